#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "pgcn/model.hpp"
#include "pgcn/prompt.hpp"

namespace pgcn {

// Prompt block: "PGCNP1", u64 M, u64 d, M·d little-endian f64, u8 sharing
// (0 none, 1 shared, 2 isolated).
void write_prompt_pool(std::ostream& out, const PromptPool& pool, PromptSharing sharing);
PromptPool read_prompt_pool(std::istream& in, PromptSharing& sharing);

// Model checkpoint: "PGCNM1", u64 layers, then per layer u64 in, u64 out,
// u8 has_bias, in·out f64 weights, [out f64 bias]; u8 sharing, u64 pool
// count, that many prompt blocks; u64 manifest hash.
struct Checkpoint {
  ModelParams params;
  PromptBank prompts;
  std::uint64_t manifest_hash = 0;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pgcn
