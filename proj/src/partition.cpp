#include "pgcn/partition.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

std::string_view to_string(PartitionStrategy s) noexcept {
  switch (s) {
    case PartitionStrategy::random_balanced: return "random_balanced";
    case PartitionStrategy::greedy_bfs: return "greedy_bfs";
    case PartitionStrategy::degree_ldg: return "degree_ldg";
  }
  return "unknown";
}

PartitionStrategy parse_partition_strategy(std::string_view name) {
  if (name == "random_balanced" || name == "random") return PartitionStrategy::random_balanced;
  if (name == "greedy_bfs" || name == "bfs") return PartitionStrategy::greedy_bfs;
  if (name == "degree_ldg" || name == "ldg") return PartitionStrategy::degree_ldg;
  throw InvalidArgument("unknown partition strategy '" + std::string(name) + "'");
}

std::vector<std::size_t> PartitionAssignment::sizes() const {
  std::vector<std::size_t> out(num_clusters, 0);
  for (auto c : cluster_of) {
    if (c < num_clusters) ++out[c];
  }
  return out;
}

std::vector<std::vector<NodeId>> PartitionAssignment::members() const {
  std::vector<std::vector<NodeId>> out(num_clusters);
  for (std::size_t v = 0; v < cluster_of.size(); ++v) {
    if (cluster_of[v] < num_clusters) out[cluster_of[v]].push_back(static_cast<NodeId>(v));
  }
  return out;
}

namespace {

constexpr std::uint32_t kUnassigned = ~std::uint32_t{0};

// Exact balanced capacities: the first n mod c clusters take one extra node.
std::vector<std::size_t> capacities(std::size_t n, std::size_t c) {
  std::vector<std::size_t> cap(c, n / c);
  for (std::size_t k = 0; k < n % c; ++k) ++cap[k];
  return cap;
}

std::vector<NodeId> seeded_order(std::size_t n, std::uint64_t seed) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(seed);
  rng.shuffle(std::span<NodeId>(order));
  return order;
}

std::vector<std::uint32_t> random_balanced(const Graph& g, std::size_t c, std::uint64_t seed) {
  const auto cap = capacities(g.num_nodes(), c);
  const auto order = seeded_order(g.num_nodes(), seed);
  std::vector<std::uint32_t> cluster(g.num_nodes());
  std::size_t pos = 0;
  for (std::size_t k = 0; k < c; ++k) {
    for (std::size_t i = 0; i < cap[k]; ++i) cluster[order[pos++]] = static_cast<std::uint32_t>(k);
  }
  return cluster;
}

// BFS from seeds taken in shuffled order; when a cluster reaches its
// capacity the search carries on into the next cluster.
std::vector<std::uint32_t> greedy_bfs(const Graph& g, std::size_t c, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const auto cap = capacities(n, c);
  const auto order = seeded_order(n, seed);
  std::vector<std::uint32_t> cluster(n, kUnassigned);
  std::vector<std::uint8_t> queued(n, 0);
  std::size_t k = 0;
  std::size_t fill = 0;
  std::deque<NodeId> frontier;
  for (NodeId s : order) {
    if (queued[s]) continue;
    queued[s] = 1;
    frontier.push_back(s);
    while (!frontier.empty()) {
      const NodeId v = frontier.front();
      frontier.pop_front();
      cluster[v] = static_cast<std::uint32_t>(k);
      if (++fill == cap[k]) {
        ++k;
        fill = 0;
      }
      for (NodeId w : g.neighbors(v)) {
        if (!queued[w]) {
          queued[w] = 1;
          frontier.push_back(w);
        }
      }
    }
  }
  return cluster;
}

// Linear deterministic greedy: each streamed node joins the open cluster with
// the largest (neighbors already there) x (1 - size/capacity). Equal scores go
// to the emptier cluster, then the lower index; without the size rule every
// node with no placed neighbor lands in cluster 0 and the result is no better
// than a random fill.
std::vector<std::uint32_t> degree_ldg(const Graph& g, std::size_t c, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  const auto cap = capacities(n, c);
  const auto order = seeded_order(n, seed);
  std::vector<std::uint32_t> cluster(n, kUnassigned);
  std::vector<std::size_t> size(c, 0);
  std::vector<std::size_t> hits(c, 0);
  std::vector<std::uint32_t> touched;
  for (NodeId v : order) {
    touched.clear();
    for (NodeId w : g.neighbors(v)) {
      const auto cw = cluster[w];
      if (cw == kUnassigned) continue;
      if (hits[cw]++ == 0) touched.push_back(cw);
    }
    std::size_t best = c;
    double best_score = -1.0;
    for (std::size_t k = 0; k < c; ++k) {
      if (size[k] >= cap[k]) continue;
      const double score =
          static_cast<double>(hits[k]) * (1.0 - static_cast<double>(size[k]) / static_cast<double>(cap[k]));
      if (score > best_score || (score == best_score && size[k] < size[best])) {
        best_score = score;
        best = k;
      }
    }
    cluster[v] = static_cast<std::uint32_t>(best);
    ++size[best];
    for (auto t : touched) hits[t] = 0;
  }
  return cluster;
}

}  // namespace

std::size_t count_edge_cut(const Graph& g, std::span<const std::uint32_t> cluster_of) {
  const auto n = static_cast<std::ptrdiff_t>(g.num_nodes());
  std::size_t cut = 0;
#pragma omp parallel for reduction(+ : cut) schedule(static) if (g.num_arcs() > (1u << 16))
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<NodeId>(i);
    for (NodeId v : g.neighbors(u)) {
      if (u < v && cluster_of[u] != cluster_of[v]) ++cut;
    }
  }
  return cut;
}

PartitionAssignment partition(const Graph& g, std::size_t c, PartitionStrategy strategy, std::uint64_t seed) {
  const std::size_t n = g.num_nodes();
  if (c == 0 || c > n) {
    throw InvalidArgument("partition: cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) +
                          "]");
  }
  PartitionAssignment p;
  p.num_clusters = c;
  switch (strategy) {
    case PartitionStrategy::random_balanced: p.cluster_of = random_balanced(g, c, seed); break;
    case PartitionStrategy::greedy_bfs: p.cluster_of = greedy_bfs(g, c, seed); break;
    case PartitionStrategy::degree_ldg: p.cluster_of = degree_ldg(g, c, seed); break;
  }
  p.edge_cut = count_edge_cut(g, p.cluster_of);
  return p;
}

PartitionReport verify_partition(const Graph& g, const PartitionAssignment& p) {
  PartitionReport r;
  const std::size_t n = g.num_nodes();
  const std::size_t c = p.num_clusters;
  if (p.cluster_of.size() != n) {
    r.length_ok = false;
    r.cover = false;
    r.failures.push_back("assignment length " + std::to_string(p.cluster_of.size()) + " != node count " +
                         std::to_string(n));
    return r;
  }
  if (c == 0) {
    r.in_range = false;
    r.failures.push_back("cluster count is zero");
    return r;
  }
  for (auto k : p.cluster_of) {
    if (k >= c) {
      r.in_range = false;
      r.cover = false;
      r.failures.push_back("cluster index out of range");
      return r;
    }
  }
  const auto sizes = p.sizes();
  if (std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; })) {
    r.non_empty = false;
    r.failures.push_back("empty cluster");
  }
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  const std::size_t allowed = (n + c - 1) / c - n / c;
  if (*hi - *lo > allowed) {
    r.balance = false;
    r.failures.push_back("cluster sizes differ by " + std::to_string(*hi - *lo) + " (allowed " +
                         std::to_string(allowed) + ")");
  }
  r.recomputed_edge_cut = count_edge_cut(g, p.cluster_of);
  if (r.recomputed_edge_cut != p.edge_cut) {
    r.edge_cut_ok = false;
    r.failures.push_back("edge_cut mismatch: stored " + std::to_string(p.edge_cut) + ", recomputed " +
                         std::to_string(r.recomputed_edge_cut));
  }
  return r;
}

}  // namespace pgcn
