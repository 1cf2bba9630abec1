#pragma once

#include <filesystem>
#include <iosfwd>

#include "pgcn/graph.hpp"

namespace pgcn {

// Text edge list: one "u v" pair of decimal integers per line. Blank lines and
// lines starting with '#' are skipped.
Graph parse_edge_list(std::istream& in, std::size_t n);
Graph load_edge_list(const std::filesystem::path& path, std::size_t n);
void write_edge_list(std::ostream& out, const Graph& g);
void save_edge_list(const std::filesystem::path& path, const Graph& g);

// Feature container: "PGCNF1", u64 n, u64 d, n·d little-endian f32, row-major.
void write_features(std::ostream& out, const DenseMatrix& h);
DenseMatrix read_features(std::istream& in);
void save_features(const std::filesystem::path& path, const DenseMatrix& h);
DenseMatrix load_features(const std::filesystem::path& path);

// Label container: "PGCNL1", u64 n, u64 num_classes, n little-endian u32
// labels, then n train flags, n val flags, n test flags (one byte each).
void write_labels(std::ostream& out, const LabelVector& y);
LabelVector read_labels(std::istream& in);
void save_labels(const std::filesystem::path& path, const LabelVector& y);
LabelVector load_labels(const std::filesystem::path& path);

/// Standard file names inside a dataset directory.
struct DatasetPaths {
  std::filesystem::path edges;
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path manifest;

  static DatasetPaths in(const std::filesystem::path& dir);
};

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const std::filesystem::path& dir, const Dataset& data);

/// Partition file: line i holds the cluster of node i.
void save_partition_file(const std::filesystem::path& path, std::span<const std::uint32_t> cluster_of);
std::vector<std::uint32_t> load_partition_file(const std::filesystem::path& path);

}  // namespace pgcn
