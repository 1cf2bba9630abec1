#include "pgcn/memory.hpp"

#include <algorithm>

namespace pgcn {

std::size_t estimate_memory(const MemoryShape& shape) {
  std::size_t words = 0;
  for (std::size_t l = 0; l + 1 < shape.widths.size(); ++l) {
    const std::size_t in = shape.widths[l];
    const std::size_t out = shape.widths[l + 1];
    words += 2 * shape.batch_nodes * out;
    words += 3 * in * out;
  }
  words += 3 * shape.prompt_params;
  words += 2 * shape.adjacency_nnz;
  return 8 * words;
}

std::size_t estimate_step_memory(const Graph& g, const PartitionAssignment& p, std::span<const std::size_t> widths,
                                 std::size_t prompt_params) {
  const auto sizes = p.sizes();
  std::vector<std::size_t> internal_arcs(p.num_clusters, 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    for (NodeId v : g.neighbors(u)) {
      if (p.cluster_of[u] == p.cluster_of[v]) ++internal_arcs[p.cluster_of[u]];
    }
  }
  std::size_t worst = 0;
  for (std::size_t k = 0; k < p.num_clusters; ++k) {
    MemoryShape shape;
    shape.batch_nodes = sizes[k];
    shape.adjacency_nnz = sizes[k] + internal_arcs[k];
    shape.widths.assign(widths.begin(), widths.end());
    shape.prompt_params = prompt_params;
    worst = std::max(worst, estimate_memory(shape));
  }
  return worst;
}

}  // namespace pgcn
