#include "pgcn/link.hpp"

#include <string>

#include "pgcn/error.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

NegativeSamples negative_sample(const Graph& g, std::span<const Edge> positives, Rng& rng) {
  const std::size_t n = g.num_nodes();
  NegativeSamples out;
  out.tails.reserve(positives.size());
  for (const auto& [u, v] : positives) {
    if (u >= n || v >= n) throw BoundsError("negative_sample: positive edge outside the graph");
    if (n < 2) throw InvalidArgument("negative_sample: no node other than the head exists");
    bool found = false;
    for (int attempt = 0; attempt < kMaxNegativeAttempts; ++attempt) {
      const auto cand = static_cast<NodeId>(rng.below(n));
      if (cand != u && !g.has_edge(u, cand)) {
        out.tails.push_back(cand);
        found = true;
        break;
      }
    }
    if (!found) {
      // Saturated neighborhood: any node but the head.
      auto cand = static_cast<NodeId>(rng.below(n - 1));
      if (cand >= u) ++cand;
      out.tails.push_back(cand);
      ++out.fallbacks;
    }
  }
  return out;
}

EdgeSplit split_edges(const Graph& g, std::uint64_t seed) {
  auto edges = g.edge_list();
  Rng rng(seed);
  rng.shuffle(std::span<Edge>(edges));
  const std::size_t m = edges.size();
  const std::size_t n_train = m * 8 / 10;
  const std::size_t n_val = m / 10;
  EdgeSplit split;
  split.train.assign(edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train),
                   edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  split.test.assign(edges.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), edges.end());
  split.message_graph = Graph::from_edges(g.num_nodes(), split.train);
  return split;
}

}  // namespace pgcn
