#include "pgcn/generator.hpp"

#include <vector>

#include "pgcn/error.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

Dataset generate_sbm(const SbmParams& params) {
  const std::size_t n = params.blocks * params.nodes_per_block;
  if (n == 0) throw InvalidArgument("generate_sbm: empty graph (blocks x nodes_per_block = 0)");
  if (!(params.p_in >= 0.0 && params.p_in <= 1.0 && params.p_out >= 0.0 && params.p_out <= 1.0)) {
    throw InvalidArgument("generate_sbm: probabilities must lie in [0, 1]");
  }
  if (params.p_out > params.p_in) throw InvalidArgument("generate_sbm: p_out must not exceed p_in");
  if (params.feature_dim == 0) throw InvalidArgument("generate_sbm: feature_dim must be positive");

  Rng edge_rng(derive_seed(params.seed, Stream::generate, 0));
  const auto block_of = [&](std::size_t v) { return v / params.nodes_per_block; };

  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      const double p = block_of(u) == block_of(v) ? params.p_in : params.p_out;
      // Draw for every pair so the stream position does not depend on p.
      if (edge_rng.uniform() < p) edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
  }

  Dataset data;
  data.graph = Graph::from_edges(n, edges);

  Rng feature_rng(derive_seed(params.seed, Stream::generate, 1));
  data.features = DenseMatrix(n, params.feature_dim);
  for (std::size_t v = 0; v < n; ++v) {
    auto row = data.features.row(v);
    for (double& x : row) x = feature_rng.normal(0.0, 1.0);
    row[block_of(v) % params.feature_dim] += params.feature_shift;
  }

  data.labels.num_classes = params.blocks;
  data.labels.labels.resize(n);
  for (std::size_t v = 0; v < n; ++v) data.labels.labels[v] = static_cast<std::uint32_t>(block_of(v));
  assign_default_masks(data.labels, derive_seed(params.seed, Stream::split));
  return data;
}

}  // namespace pgcn
