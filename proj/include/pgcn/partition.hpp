#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pgcn/graph.hpp"

namespace pgcn {

enum class PartitionStrategy { random_balanced, greedy_bfs, degree_ldg };

std::string_view to_string(PartitionStrategy s) noexcept;
PartitionStrategy parse_partition_strategy(std::string_view name);

struct PartitionAssignment {
  std::vector<std::uint32_t> cluster_of;
  std::size_t num_clusters = 0;
  std::size_t edge_cut = 0;

  std::vector<std::size_t> sizes() const;
  /// Node ids of each cluster in ascending order.
  std::vector<std::vector<NodeId>> members() const;
};

/// Splits g into c non-empty clusters whose sizes differ by at most one.
/// Deterministic in (strategy, seed). Throws InvalidArgument unless 1 <= c <= n.
PartitionAssignment partition(const Graph& g, std::size_t c, PartitionStrategy strategy, std::uint64_t seed);

std::size_t count_edge_cut(const Graph& g, std::span<const std::uint32_t> cluster_of);

struct PartitionReport {
  bool length_ok = true;
  bool in_range = true;
  bool cover = true;      // every node assigned to one cluster
  bool non_empty = true;  // no cluster left empty
  bool balance = true;
  bool edge_cut_ok = true;
  std::size_t recomputed_edge_cut = 0;
  std::vector<std::string> failures;

  bool ok() const noexcept { return failures.empty(); }
};

/// Recomputes every partition invariant. Never throws; failures are listed.
PartitionReport verify_partition(const Graph& g, const PartitionAssignment& p);

}  // namespace pgcn
