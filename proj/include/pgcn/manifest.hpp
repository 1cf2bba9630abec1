#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace pgcn {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t hash_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t value);

/// Provenance of one CLI run.
struct RunManifest {
  std::string command;
  std::string config;  // canonical key=value text
  std::map<std::string, std::string> inputs;   // name -> content hash
  std::map<std::string, std::string> outputs;  // name -> path
  std::uint64_t seed = 0;
  std::string version = PGCN_VERSION;

  /// Hash over everything except output paths, so reruns into another
  /// directory embed the same value.
  std::uint64_t hash() const;
  std::string to_json() const;
};

}  // namespace pgcn
