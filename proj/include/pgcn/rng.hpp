#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pgcn {

/// Independent randomness streams derived from one run seed, so that changing
/// how one component draws numbers never perturbs another.
enum class Stream : std::uint64_t {
  generate = 1,
  partition = 2,
  init = 3,
  prompt_init = 4,
  dropout = 5,
  negatives = 6,
  split = 7,
  eval_negatives = 8,
  shuffle = 9,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, Stream stream) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index) noexcept;

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);

  double normal(double mean, double stddev);

  bool bernoulli(double p) { return uniform() < p; }

  /// Fisher-Yates, drawing from below() so the permutation only depends on the seed.
  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  engine_type& engine() noexcept { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace pgcn
