#include "pgcn/prompt.hpp"

#include <cmath>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/kernels.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

std::string_view to_string(AttachMode m) noexcept {
  switch (m) {
    case AttachMode::concat: return "concat";
    case AttachMode::add: return "add";
    case AttachMode::mul: return "mul";
    case AttachMode::weighted: return "weighted";
  }
  return "unknown";
}

std::string_view to_string(PromptSharing s) noexcept {
  switch (s) {
    case PromptSharing::none: return "none";
    case PromptSharing::shared: return "shared";
    case PromptSharing::isolated: return "isolated";
  }
  return "unknown";
}

AttachMode parse_attach_mode(std::string_view name) {
  if (name == "concat") return AttachMode::concat;
  if (name == "add") return AttachMode::add;
  if (name == "mul") return AttachMode::mul;
  if (name == "weighted") return AttachMode::weighted;
  throw InvalidArgument("unknown attachment mode '" + std::string(name) + "'");
}

PromptSharing parse_prompt_sharing(std::string_view name) {
  if (name == "none") return PromptSharing::none;
  if (name == "shared") return PromptSharing::shared;
  if (name == "isolated") return PromptSharing::isolated;
  throw InvalidArgument("unknown prompt sharing mode '" + std::string(name) + "'");
}

std::size_t fused_width(AttachMode mode, std::size_t d) noexcept { return mode == AttachMode::concat ? 2 * d : d; }

PromptPool PromptPool::random(std::size_t m, std::size_t d, std::uint64_t seed) {
  if (d == 0) throw InvalidArgument("PromptPool: zero embedding dimension");
  Rng rng(seed);
  DenseMatrix values(m, d);
  const double stddev = 1.0 / std::sqrt(static_cast<double>(d));
  for (double& v : values.values()) v = rng.normal(0.0, stddev);
  return PromptPool(std::move(values));
}

std::size_t select_prompt(std::span<const double> h, const PromptPool& pool) {
  if (pool.empty()) throw InvalidState("select_prompt: empty prompt pool");
  if (h.size() != pool.dim()) {
    throw ShapeError("select_prompt: feature width " + std::to_string(h.size()) + " vs prompt width " +
                     std::to_string(pool.dim()));
  }
  const auto& p = pool.values();
  std::size_t best = 0;
  double best_dot = 0.0;
  for (std::size_t m = 0; m < p.rows(); ++m) {
    double dot = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) dot += p(m, k) * h[k];
    if (m == 0 || dot > best_dot) {
      best = m;
      best_dot = dot;
    }
  }
  return best;
}

std::vector<std::size_t> select_prompts(const DenseMatrix& features, const PromptPool& pool) {
  if (pool.empty()) throw InvalidState("select_prompts: empty prompt pool");
  if (features.cols() != pool.dim()) {
    throw ShapeError("select_prompts: feature width " + std::to_string(features.cols()) + " vs prompt width " +
                     std::to_string(pool.dim()));
  }
  std::vector<std::size_t> out(features.rows());
  const auto rows = static_cast<std::ptrdiff_t>(features.rows());
#pragma omp parallel for schedule(static) if (features.size() * pool.size() > (1u << 15))
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    out[static_cast<std::size_t>(i)] = select_prompt(features.row(static_cast<std::size_t>(i)), pool);
  }
  return out;
}

std::vector<double> attach(std::span<const double> h, std::span<const double> p, AttachMode mode, double alpha) {
  if (h.size() != p.size()) {
    throw ShapeError("attach: feature width " + std::to_string(h.size()) + " vs prompt width " +
                     std::to_string(p.size()));
  }
  std::vector<double> out;
  switch (mode) {
    case AttachMode::concat:
      out.assign(h.begin(), h.end());
      out.insert(out.end(), p.begin(), p.end());
      break;
    case AttachMode::add:
      out.resize(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] + p[i];
      break;
    case AttachMode::mul:
      out.resize(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] * p[i];
      break;
    case AttachMode::weighted:
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("attach: alpha must lie in [0, 1]");
      out.resize(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) out[i] = alpha * h[i] + (1.0 - alpha) * p[i];
      break;
  }
  return out;
}

double orthogonality_loss(const PromptPool& pool) {
  if (pool.empty()) throw InvalidState("orthogonality_loss: empty prompt pool");
  DenseMatrix gram = kernels::matmul_a_bt(pool.values(), pool.values());
  double s = 0.0;
  for (std::size_t i = 0; i < gram.rows(); ++i) {
    for (std::size_t j = 0; j < gram.cols(); ++j) {
      const double r = gram(i, j) - (i == j ? 1.0 : 0.0);
      s += r * r;
    }
  }
  return s;
}

FusedFeatures batch_select_attach(const DenseMatrix& features, const PromptPool& pool, AttachMode mode,
                                  double alpha) {
  FusedFeatures out;
  out.selection = select_prompts(features, pool);
  out.values = DenseMatrix(features.rows(), fused_width(mode, features.cols()));
  for (std::size_t j = 0; j < features.rows(); ++j) {
    const auto fused = attach(features.row(j), pool.values().row(out.selection[j]), mode, alpha);
    std::copy(fused.begin(), fused.end(), out.values.row(j).begin());
  }
  return out;
}

PromptBank::PromptBank(PromptSharing sharing, std::size_t clusters, std::size_t m, std::size_t d,
                       std::uint64_t seed)
    : sharing_(sharing) {
  if (sharing == PromptSharing::none) return;
  if (m == 0) throw InvalidArgument("PromptBank: prompt count must be positive");
  const std::size_t count = sharing == PromptSharing::shared ? 1 : clusters;
  if (count == 0) throw InvalidArgument("PromptBank: isolated prompts need at least one cluster");
  pools_.reserve(count);
  for (std::size_t t = 0; t < count; ++t) pools_.push_back(PromptPool::random(m, d, seed + t));
}

PromptBank::PromptBank(PromptSharing sharing, std::vector<PromptPool> pools)
    : sharing_(sharing), pools_(std::move(pools)) {
  if (sharing == PromptSharing::none && !pools_.empty()) throw InvalidArgument("PromptBank: pools without sharing");
  if (sharing == PromptSharing::shared && pools_.size() != 1) {
    throw InvalidArgument("PromptBank: shared mode holds exactly one pool");
  }
}

PromptPool* PromptBank::pool_for(std::size_t cluster) {
  return const_cast<PromptPool*>(std::as_const(*this).pool_for(cluster));
}

const PromptPool* PromptBank::pool_for(std::size_t cluster) const {
  switch (sharing_) {
    case PromptSharing::none: return nullptr;
    case PromptSharing::shared: return &pools_.front();
    case PromptSharing::isolated:
      if (cluster >= pools_.size()) throw BoundsError("PromptBank: no pool for cluster " + std::to_string(cluster));
      return &pools_[cluster];
  }
  return nullptr;
}

std::size_t PromptBank::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& p : pools_) total += p.values().size();
  return total;
}

}  // namespace pgcn
