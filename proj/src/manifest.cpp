#include "pgcn/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "json.hpp"
#include "pgcn/error.hpp"

namespace pgcn {

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for hashing");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::uint64_t RunManifest::hash() const {
  const nlohmann::json j = {
      {"command", command}, {"config", config}, {"inputs", inputs}, {"seed", seed}, {"version", version}};
  return fnv1a64(j.dump());
}

std::string RunManifest::to_json() const {
  const nlohmann::json j = {{"command", command}, {"config", config}, {"inputs", inputs}, {"outputs", outputs},
                            {"seed", seed},       {"version", version}, {"hash", hex64(hash())}};
  return j.dump(2);
}

}  // namespace pgcn
