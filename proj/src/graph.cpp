#include "pgcn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

Graph::Graph(std::size_t num_nodes, std::vector<std::size_t> offsets, std::vector<NodeId> targets, bool undirected)
    : num_nodes_(num_nodes), offsets_(std::move(offsets)), targets_(std::move(targets)), undirected_(undirected) {
  validate();
}

Graph Graph::from_edges(std::size_t num_nodes, std::span<const Edge> edges) {
  std::vector<std::size_t> degree(num_nodes + 1, 0);
  for (const auto& [u, v] : edges) {
    if (u >= num_nodes || v >= num_nodes) {
      throw BoundsError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") outside [0, " +
                        std::to_string(num_nodes) + ")");
    }
    if (u == v) continue;
    ++degree[u + 1];
    ++degree[v + 1];
  }
  std::partial_sum(degree.begin(), degree.end(), degree.begin());
  std::vector<NodeId> targets(degree.back());
  std::vector<std::size_t> cursor(degree.begin(), degree.end() - 1);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    targets[cursor[u]++] = v;
    targets[cursor[v]++] = u;
  }

  // Sort and dedup each row, compacting in place.
  std::vector<std::size_t> offsets(num_nodes + 1, 0);
  std::size_t write = 0;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    auto first = targets.begin() + static_cast<std::ptrdiff_t>(degree[v]);
    auto last = targets.begin() + static_cast<std::ptrdiff_t>(degree[v + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    for (auto it = first; it != last; ++it) targets[write++] = *it;
    offsets[v + 1] = write;
  }
  targets.resize(write);
  Graph g;
  g.num_nodes_ = num_nodes;
  g.offsets_ = std::move(offsets);
  g.targets_ = std::move(targets);
  g.undirected_ = true;
  return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const noexcept {
  const auto row = neighbors(u);
  return std::binary_search(row.begin(), row.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeId u = 0; u < num_nodes_; ++u) {
    for (NodeId v : neighbors(u)) {
      if (!undirected_ || u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> out(num_nodes_);
  for (NodeId v = 0; v < num_nodes_; ++v) out[v] = degree(v);
  return out;
}

void Graph::validate() const {
  if (offsets_.size() != num_nodes_ + 1) throw ValidationError("graph: offsets length != n+1");
  if (offsets_.front() != 0) throw ValidationError("graph: offsets[0] != 0");
  if (offsets_.back() != targets_.size()) throw ValidationError("graph: offsets[n] != number of targets");
  for (std::size_t v = 0; v < num_nodes_; ++v) {
    if (offsets_[v] > offsets_[v + 1]) throw ValidationError("graph: offsets decrease at node " + std::to_string(v));
    const auto row = neighbors(static_cast<NodeId>(v));
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i] >= num_nodes_) throw ValidationError("graph: target out of range in row " + std::to_string(v));
      if (i > 0 && row[i] <= row[i - 1]) {
        throw ValidationError("graph: row " + std::to_string(v) + " unsorted or duplicated");
      }
    }
  }
  if (undirected_) {
    for (NodeId u = 0; u < num_nodes_; ++u) {
      for (NodeId v : neighbors(u)) {
        if (!has_edge(v, u)) {
          throw ValidationError("graph: edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                ") has no reverse");
        }
      }
    }
  }
}

void LabelVector::validate() const {
  const std::size_t n = labels.size();
  if (train.size() != n || val.size() != n || test.size() != n) {
    throw ValidationError("labels: mask lengths differ from label count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= num_classes) {
      throw ValidationError("labels: node " + std::to_string(i) + " has class " + std::to_string(labels[i]) +
                            " >= " + std::to_string(num_classes));
    }
    if (int(train[i] != 0) + int(val[i] != 0) + int(test[i] != 0) > 1) {
      throw ValidationError("labels: masks overlap at node " + std::to_string(i));
    }
  }
}

void Dataset::validate() const {
  graph.validate();
  labels.validate();
  if (features.rows() != graph.num_nodes()) throw ValidationError("dataset: feature rows != node count");
  if (labels.size() != graph.num_nodes()) throw ValidationError("dataset: label count != node count");
  if (!features.all_finite()) throw ValidationError("dataset: non-finite feature value");
}

namespace {

// Global -> local id map; throws on duplicates or out-of-range ids.
std::vector<std::int64_t> local_index(std::size_t n, std::span<const NodeId> ids) {
  std::vector<std::int64_t> local(n, -1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const NodeId v = ids[i];
    if (v >= n) throw BoundsError("induce_subgraph: node " + std::to_string(v) + " out of range");
    if (local[v] >= 0) throw ValidationError("induce_subgraph: duplicate node " + std::to_string(v));
    local[v] = static_cast<std::int64_t>(i);
  }
  return local;
}

}  // namespace

Graph induce_graph(const Graph& g, std::span<const NodeId> ids) {
  const auto local = local_index(g.num_nodes(), ids);
  std::vector<std::size_t> offsets(ids.size() + 1, 0);
  std::vector<NodeId> targets;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::size_t row_start = targets.size();
    for (NodeId w : g.neighbors(ids[i])) {
      if (local[w] >= 0) targets.push_back(static_cast<NodeId>(local[w]));
    }
    // Local order may differ from global order.
    std::sort(targets.begin() + static_cast<std::ptrdiff_t>(row_start), targets.end());
    offsets[i + 1] = targets.size();
  }
  return Graph(ids.size(), std::move(offsets), std::move(targets), g.undirected());
}

SubgraphBatch induce_subgraph(const Graph& g, const DenseMatrix& h, const LabelVector& y,
                              std::span<const NodeId> ids) {
  SubgraphBatch batch;
  batch.local_graph = induce_graph(g, ids);
  batch.global_ids.assign(ids.begin(), ids.end());

  const std::size_t d = h.cols();
  batch.local_features = DenseMatrix(ids.size(), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto src = h.row(ids[i]);
    std::copy(src.begin(), src.end(), batch.local_features.row(i).begin());
  }

  auto& ly = batch.local_labels;
  ly.num_classes = y.num_classes;
  ly.labels.resize(ids.size());
  ly.train.resize(ids.size());
  ly.val.resize(ids.size());
  ly.test.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const NodeId v = ids[i];
    if (v < y.labels.size()) ly.labels[i] = y.labels[v];
    if (v < y.train.size()) {
      ly.train[i] = y.train[v];
      ly.val[i] = y.val[v];
      ly.test[i] = y.test[v];
    }
  }
  return batch;
}

void assign_default_masks(LabelVector& y, std::uint64_t seed) {
  const std::size_t n = y.labels.size();
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  Rng rng(seed);
  rng.shuffle(std::span<NodeId>(order));
  const std::size_t n_train = n * 6 / 10;
  const std::size_t n_val = n * 2 / 10;
  y.train.assign(n, 0);
  y.val.assign(n, 0);
  y.test.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < n_train) {
      y.train[order[i]] = 1;
    } else if (i < n_train + n_val) {
      y.val[order[i]] = 1;
    } else {
      y.test[order[i]] = 1;
    }
  }
}

}  // namespace pgcn
