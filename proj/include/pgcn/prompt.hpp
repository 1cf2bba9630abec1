#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "pgcn/dense.hpp"

namespace pgcn {

enum class AttachMode { concat, add, mul, weighted };
enum class PromptSharing { none, shared, isolated };

std::string_view to_string(AttachMode m) noexcept;
std::string_view to_string(PromptSharing s) noexcept;
AttachMode parse_attach_mode(std::string_view name);
PromptSharing parse_prompt_sharing(std::string_view name);

/// Width of the fused input row for a d-dimensional feature.
std::size_t fused_width(AttachMode mode, std::size_t d) noexcept;

/// M learnable prompt rows of the node-feature width d.
class PromptPool {
 public:
  PromptPool() = default;
  explicit PromptPool(DenseMatrix values) : values_(std::move(values)) {}

  /// Gaussian init, mean 0, std 1/sqrt(d).
  static PromptPool random(std::size_t m, std::size_t d, std::uint64_t seed);

  std::size_t size() const noexcept { return values_.rows(); }
  std::size_t dim() const noexcept { return values_.cols(); }
  bool empty() const noexcept { return values_.rows() == 0; }

  const DenseMatrix& values() const noexcept { return values_; }
  /// Mutable access for the optimizer; bumps the version counter.
  DenseMatrix& mutable_values() noexcept {
    ++version_;
    return values_;
  }
  /// Number of writes through mutable_values(); lets callers observe which
  /// update a forward pass read.
  std::uint64_t version() const noexcept { return version_; }

 private:
  DenseMatrix values_;
  std::uint64_t version_ = 0;
};

/// Argmax over m of dot(P_m, h); ties go to the lowest index.
/// Throws InvalidState for an empty pool and ShapeError on a width mismatch.
std::size_t select_prompt(std::span<const double> h, const PromptPool& pool);

/// select_prompt for every row of features; parallel over rows.
std::vector<std::size_t> select_prompts(const DenseMatrix& features, const PromptPool& pool);

/// concat -> [h‖p]; add -> h+p; mul -> h⊙p; weighted -> alpha·h + (1-alpha)·p.
std::vector<double> attach(std::span<const double> h, std::span<const double> p, AttachMode mode,
                           double alpha = 0.5);

/// ‖P·Pᵀ − I_M‖²_F
double orthogonality_loss(const PromptPool& pool);

struct FusedFeatures {
  DenseMatrix values;
  std::vector<std::size_t> selection;
};

FusedFeatures batch_select_attach(const DenseMatrix& features, const PromptPool& pool, AttachMode mode,
                                  double alpha = 0.5);

/// The prompt parameters of a run: nothing, one pool read by every subgraph,
/// or one private pool per subgraph.
class PromptBank {
 public:
  PromptBank() = default;
  /// Isolated pools use seed offset by the cluster id, so pool 0 of an
  /// isolated bank equals the pool of a shared bank with the same seed.
  PromptBank(PromptSharing sharing, std::size_t clusters, std::size_t m, std::size_t d, std::uint64_t seed);
  /// Rebuilds a bank from stored pools (checkpoint loading).
  PromptBank(PromptSharing sharing, std::vector<PromptPool> pools);

  PromptSharing sharing() const noexcept { return sharing_; }
  std::size_t num_pools() const noexcept { return pools_.size(); }

  /// nullptr when sharing is none.
  PromptPool* pool_for(std::size_t cluster);
  const PromptPool* pool_for(std::size_t cluster) const;

  std::span<PromptPool> pools() noexcept { return pools_; }
  std::span<const PromptPool> pools() const noexcept { return pools_; }

  std::size_t parameter_count() const noexcept;

 private:
  PromptSharing sharing_ = PromptSharing::none;
  std::vector<PromptPool> pools_;
};

}  // namespace pgcn
