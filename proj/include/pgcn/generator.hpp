#pragma once

#include <cstdint>

#include "pgcn/graph.hpp"

namespace pgcn {

struct SbmParams {
  std::size_t blocks = 4;
  std::size_t nodes_per_block = 300;
  double p_in = 0.05;
  double p_out = 0.002;
  std::size_t feature_dim = 32;
  /// Scale of the block one-hot added to the unit-variance feature noise.
  double feature_shift = 1.0;
  std::uint64_t seed = 0;
};

/// Stochastic block model. Node v belongs to block v / nodes_per_block; its
/// label is the block and its features are N(shift·e_{block mod d}, I).
Dataset generate_sbm(const SbmParams& params);

}  // namespace pgcn
