#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pgcn/graph.hpp"

namespace pgcn {

class Rng;

struct NegativeSamples {
  std::vector<NodeId> tails;
  /// Positives whose head had no non-neighbor found within the attempt budget.
  std::size_t fallbacks = 0;
};

/// For each positive (u, v) draws v' uniformly with v' != u and (u, v') not an
/// edge, by rejection. After kMaxAttempts misses it falls back to a uniform
/// node other than u. Throws InvalidArgument when no node other than u exists.
NegativeSamples negative_sample(const Graph& g, std::span<const Edge> positives, Rng& rng);

inline constexpr int kMaxNegativeAttempts = 100;

struct EdgeSplit {
  Graph message_graph;  // training edges only
  std::vector<Edge> train;
  std::vector<Edge> val;
  std::vector<Edge> test;
};

/// Seeded 80/10/10 split of the undirected edges. Validation and test edges
/// are removed from the message-passing graph.
EdgeSplit split_edges(const Graph& g, std::uint64_t seed);

}  // namespace pgcn
