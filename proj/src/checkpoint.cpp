#include "pgcn/checkpoint.hpp"

#include <fstream>
#include <string>

#include "binary_io.hpp"
#include "pgcn/error.hpp"

namespace pgcn {

namespace {

constexpr std::string_view kPromptMagic = "PGCNP1";
constexpr std::string_view kModelMagic = "PGCNM1";
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 28;

std::uint8_t sharing_code(PromptSharing s) {
  switch (s) {
    case PromptSharing::none: return 0;
    case PromptSharing::shared: return 1;
    case PromptSharing::isolated: return 2;
  }
  return 0;
}

PromptSharing sharing_from_code(std::uint8_t code) {
  switch (code) {
    case 0: return PromptSharing::none;
    case 1: return PromptSharing::shared;
    case 2: return PromptSharing::isolated;
    default: throw FormatError("unknown prompt sharing code " + std::to_string(code));
  }
}

DenseMatrix read_matrix(std::istream& in, std::uint64_t rows, std::uint64_t cols, const char* what) {
  binary::check_count(rows, kMaxDim, what);
  binary::check_count(cols, kMaxDim, what);
  if (cols != 0) binary::check_count(rows, kMaxDim / cols, what);
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = binary::read_f64(in, what);
  return m;
}

}  // namespace

void write_prompt_pool(std::ostream& out, const PromptPool& pool, PromptSharing sharing) {
  binary::write_magic(out, kPromptMagic);
  binary::write_u64(out, pool.size());
  binary::write_u64(out, pool.dim());
  for (double v : pool.values().values()) binary::write_f64(out, v);
  binary::write_u8(out, sharing_code(sharing));
}

PromptPool read_prompt_pool(std::istream& in, PromptSharing& sharing) {
  binary::expect_magic(in, kPromptMagic);
  const auto m = binary::read_u64(in, "prompt header");
  const auto d = binary::read_u64(in, "prompt header");
  DenseMatrix values = read_matrix(in, m, d, "prompt payload");
  sharing = sharing_from_code(binary::read_u8(in, "prompt sharing"));
  return PromptPool(std::move(values));
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  const auto& p = ckpt.params;
  p.validate();
  binary::write_magic(out, kModelMagic);
  binary::write_u64(out, p.num_layers());
  for (std::size_t l = 0; l < p.num_layers(); ++l) {
    const auto& w = p.weights[l];
    binary::write_u64(out, w.rows());
    binary::write_u64(out, w.cols());
    binary::write_u8(out, p.has_bias() ? 1 : 0);
    for (double v : w.values()) binary::write_f64(out, v);
    if (p.has_bias()) {
      for (double v : p.biases[l].values()) binary::write_f64(out, v);
    }
  }
  binary::write_u8(out, sharing_code(ckpt.prompts.sharing()));
  binary::write_u64(out, ckpt.prompts.num_pools());
  for (const auto& pool : ckpt.prompts.pools()) write_prompt_pool(out, pool, ckpt.prompts.sharing());
  binary::write_u64(out, ckpt.manifest_hash);
}

Checkpoint read_checkpoint(std::istream& in) {
  binary::expect_magic(in, kModelMagic);
  Checkpoint ckpt;
  const auto layers = binary::read_u64(in, "model header");
  binary::check_count(layers, 1024, "layer count");
  bool any_bias = false;
  for (std::uint64_t l = 0; l < layers; ++l) {
    const auto rows = binary::read_u64(in, "layer header");
    const auto cols = binary::read_u64(in, "layer header");
    const bool bias = binary::read_u8(in, "layer header") != 0;
    if (l > 0 && bias != any_bias) throw FormatError("checkpoint mixes layers with and without bias");
    any_bias = bias;
    ckpt.params.weights.push_back(read_matrix(in, rows, cols, "layer weights"));
    if (bias) ckpt.params.biases.push_back(read_matrix(in, 1, cols, "layer bias"));
  }
  ckpt.params.validate();
  const auto sharing = sharing_from_code(binary::read_u8(in, "prompt sharing"));
  const auto pools = binary::read_u64(in, "pool count");
  binary::check_count(pools, 1u << 20, "pool count");
  std::vector<PromptPool> loaded;
  for (std::uint64_t i = 0; i < pools; ++i) {
    PromptSharing block_sharing;
    loaded.push_back(read_prompt_pool(in, block_sharing));
    if (block_sharing != sharing) throw FormatError("prompt block sharing mode disagrees with checkpoint");
  }
  ckpt.prompts = PromptBank(sharing, std::move(loaded));
  ckpt.manifest_hash = binary::read_u64(in, "manifest hash");
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_checkpoint(out, ckpt);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return read_checkpoint(in);
}

}  // namespace pgcn
