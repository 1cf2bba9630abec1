#include "pgcn/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "pgcn/error.hpp"

namespace pgcn {

namespace {

constexpr std::string_view kFeatureMagic = "PGCNF1";
constexpr std::string_view kLabelMagic = "PGCNL1";
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 34;

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

bool parse_index(std::string_view token, std::uint64_t& value) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

Graph parse_edge_list(std::istream& in, std::size_t n) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a)) continue;  // blank
    if (a.front() == '#') continue;
    if (!(fields >> b) || (fields >> extra)) throw ParseError(line_no, "expected two integers \"u v\"");
    std::uint64_t u = 0, v = 0;
    if (!parse_index(a, u) || !parse_index(b, v)) throw ParseError(line_no, "not a non-negative integer pair");
    if (u >= n || v >= n) {
      throw BoundsError("line " + std::to_string(line_no) + ": node index out of range [0, " + std::to_string(n) +
                        ")");
    }
    edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
  }
  return Graph::from_edges(n, edges);
}

Graph load_edge_list(const std::filesystem::path& path, std::size_t n) {
  auto in = open_in(path);
  return parse_edge_list(in, n);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  for (const auto& [u, v] : g.edge_list()) out << u << ' ' << v << '\n';
}

void save_edge_list(const std::filesystem::path& path, const Graph& g) {
  auto out = open_out(path);
  write_edge_list(out, g);
  finish(out, path);
}

void write_features(std::ostream& out, const DenseMatrix& h) {
  binary::write_magic(out, kFeatureMagic);
  binary::write_u64(out, h.rows());
  binary::write_u64(out, h.cols());
  for (double v : h.values()) binary::write_f32(out, static_cast<float>(v));
}

DenseMatrix read_features(std::istream& in) {
  binary::expect_magic(in, kFeatureMagic);
  const auto n = binary::read_u64(in, "feature header");
  const auto d = binary::read_u64(in, "feature header");
  binary::check_count(n, kMaxEntries, "node count");
  binary::check_count(d, kMaxEntries, "feature dimension");
  if (d != 0) binary::check_count(n, kMaxEntries / d, "feature matrix size");
  DenseMatrix h(n, d);
  for (double& v : h.values()) v = binary::read_f32(in, "feature payload");
  if (!h.all_finite()) throw FormatError("feature file contains non-finite values");
  return h;
}

void save_features(const std::filesystem::path& path, const DenseMatrix& h) {
  auto out = open_out(path);
  write_features(out, h);
  finish(out, path);
}

DenseMatrix load_features(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_features(in);
}

void write_labels(std::ostream& out, const LabelVector& y) {
  binary::write_magic(out, kLabelMagic);
  binary::write_u64(out, y.size());
  binary::write_u64(out, y.num_classes);
  for (auto label : y.labels) binary::write_u32(out, label);
  for (const auto* mask : {&y.train, &y.val, &y.test}) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      binary::write_u8(out, i < mask->size() && (*mask)[i] ? 1 : 0);
    }
  }
}

LabelVector read_labels(std::istream& in) {
  binary::expect_magic(in, kLabelMagic);
  const auto n = binary::read_u64(in, "label header");
  binary::check_count(n, kMaxEntries, "node count");
  LabelVector y;
  y.num_classes = binary::read_u64(in, "label header");
  y.labels.resize(n);
  for (auto& label : y.labels) label = binary::read_u32(in, "label payload");
  for (auto* mask : {&y.train, &y.val, &y.test}) {
    mask->resize(n);
    for (auto& flag : *mask) {
      const auto b = binary::read_u8(in, "mask payload");
      if (b > 1) throw FormatError("mask flag must be 0 or 1");
      flag = b;
    }
  }
  y.validate();
  return y;
}

void save_labels(const std::filesystem::path& path, const LabelVector& y) {
  auto out = open_out(path);
  write_labels(out, y);
  finish(out, path);
}

LabelVector load_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_labels(in);
}

DatasetPaths DatasetPaths::in(const std::filesystem::path& dir) {
  return {dir / "edges.txt", dir / "features.pgcnf", dir / "labels.pgcnl", dir / "manifest.json"};
}

Dataset load_dataset(const std::filesystem::path& dir) {
  const auto paths = DatasetPaths::in(dir);
  Dataset data;
  data.features = load_features(paths.features);
  data.labels = load_labels(paths.labels);
  if (data.labels.size() != data.features.rows()) {
    throw ValidationError("label file has " + std::to_string(data.labels.size()) + " nodes, feature file " +
                          std::to_string(data.features.rows()));
  }
  data.graph = load_edge_list(paths.edges, data.features.rows());
  data.validate();
  return data;
}

void save_dataset(const std::filesystem::path& dir, const Dataset& data) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto paths = DatasetPaths::in(dir);
  save_edge_list(paths.edges, data.graph);
  save_features(paths.features, data.features);
  save_labels(paths.labels, data.labels);
}

void save_partition_file(const std::filesystem::path& path, std::span<const std::uint32_t> cluster_of) {
  auto out = open_out(path);
  for (auto c : cluster_of) out << c << '\n';
  finish(out, path);
}

std::vector<std::uint32_t> load_partition_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<std::uint32_t> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::uint64_t c = 0;
    if (!parse_index(line, c) || c > UINT32_MAX) throw ParseError(line_no, "expected a cluster index");
    out.push_back(static_cast<std::uint32_t>(c));
  }
  return out;
}

}  // namespace pgcn
