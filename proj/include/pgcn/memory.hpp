#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pgcn/graph.hpp"
#include "pgcn/partition.hpp"

namespace pgcn {

struct MemoryShape {
  std::size_t batch_nodes = 0;
  std::size_t adjacency_nnz = 0;    // nnz of Â, self-loops included
  std::vector<std::size_t> widths;  // layer l maps widths[l] -> widths[l+1]
  std::size_t prompt_params = 0;    // M·d of the pool live in the step
};

/// Analytic bytes held during one training step with 8-byte reals:
/// activations and their tape caches (2·n·out per layer), weights with two
/// Adam moments (3·in·out per layer), the prompt pool with its moments
/// (3·M·d), and the normalized adjacency (2 words per nonzero).
std::size_t estimate_memory(const MemoryShape& shape);

/// Worst step over the clusters of p.
std::size_t estimate_step_memory(const Graph& g, const PartitionAssignment& p, std::span<const std::size_t> widths,
                                 std::size_t prompt_params);

}  // namespace pgcn
