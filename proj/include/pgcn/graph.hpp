#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "pgcn/dense.hpp"

namespace pgcn {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

/// CSR adjacency. Stored undirected and symmetric: every edge appears once in
/// each endpoint's row, rows are sorted, no duplicates and no self-loops.
class Graph {
 public:
  Graph() : offsets_{0} {}
  Graph(std::size_t num_nodes, std::vector<std::size_t> offsets, std::vector<NodeId> targets,
        bool undirected = true);

  /// Symmetrizes, drops self-loops, deduplicates and sorts.
  static Graph from_edges(std::size_t num_nodes, std::span<const Edge> edges);

  std::size_t num_nodes() const noexcept { return num_nodes_; }
  /// Number of undirected edges.
  std::size_t num_edges() const noexcept { return undirected_ ? targets_.size() / 2 : targets_.size(); }
  std::size_t num_arcs() const noexcept { return targets_.size(); }
  bool undirected() const noexcept { return undirected_; }

  std::size_t degree(NodeId v) const noexcept { return offsets_[v + 1] - offsets_[v]; }
  std::span<const NodeId> neighbors(NodeId v) const noexcept {
    return {targets_.data() + offsets_[v], degree(v)};
  }
  bool has_edge(NodeId u, NodeId v) const noexcept;

  std::span<const std::size_t> offsets() const noexcept { return offsets_; }
  std::span<const NodeId> targets() const noexcept { return targets_; }

  /// Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edge_list() const;
  std::vector<std::size_t> degrees() const;

  /// Throws ValidationError on the first broken CSR invariant.
  void validate() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_nodes_ = 0;
  std::vector<std::size_t> offsets_;
  std::vector<NodeId> targets_;
  bool undirected_ = true;
};

/// Node classes plus disjoint train/val/test masks (one byte per node).
struct LabelVector {
  std::vector<std::uint32_t> labels;
  std::size_t num_classes = 0;
  std::vector<std::uint8_t> train;
  std::vector<std::uint8_t> val;
  std::vector<std::uint8_t> test;

  std::size_t size() const noexcept { return labels.size(); }
  void validate() const;

  friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

struct Dataset {
  Graph graph;
  DenseMatrix features;  // n×d, row j is node j
  LabelVector labels;

  std::size_t num_nodes() const noexcept { return graph.num_nodes(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }
  void validate() const;
};

/// Induced subgraph on a node subset. Local id i corresponds to global_ids[i].
struct SubgraphBatch {
  std::vector<NodeId> global_ids;
  Graph local_graph;
  DenseMatrix local_features;
  LabelVector local_labels;

  std::size_t size() const noexcept { return global_ids.size(); }
};

/// Keeps exactly the edges with both endpoints in ids. Throws ValidationError
/// on duplicate ids and BoundsError on out-of-range ids.
SubgraphBatch induce_subgraph(const Graph& g, const DenseMatrix& h, const LabelVector& y,
                              std::span<const NodeId> ids);

/// Graph-only variant used where features and labels are not needed.
Graph induce_graph(const Graph& g, std::span<const NodeId> ids);

/// 60/20/20 split over a seeded shuffle of the node ids.
void assign_default_masks(LabelVector& y, std::uint64_t seed);

}  // namespace pgcn
