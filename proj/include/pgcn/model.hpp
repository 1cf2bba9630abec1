#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pgcn/dense.hpp"
#include "pgcn/graph.hpp"
#include "pgcn/prompt.hpp"
#include "pgcn/sparse.hpp"
#include "pgcn/tape.hpp"

namespace pgcn {

class Rng;

/// Per-layer GCN weights. Layer l maps widths[l] -> widths[l+1].
struct ModelParams {
  std::vector<DenseMatrix> weights;
  std::vector<DenseMatrix> biases;  // empty, or one 1×out row per layer

  std::size_t num_layers() const noexcept { return weights.size(); }
  bool has_bias() const noexcept { return !biases.empty(); }
  std::vector<std::size_t> widths() const;
  std::size_t parameter_count() const noexcept;
  void validate() const;
};

/// Glorot-uniform weights and zero biases.
ModelParams init_params(std::span<const std::size_t> widths, bool bias, std::uint64_t seed);

/// Layer widths for a model with the given input width and k layers.
std::vector<std::size_t> layer_widths(std::size_t input_width, std::size_t hidden, std::size_t output,
                                      std::size_t layers);

/// D^{-1/2}(A+I)D^{-1/2} over a symmetric graph.
SparseMatrix normalize_adjacency(const Graph& g);

struct ModelOptions {
  AttachMode mode = AttachMode::concat;
  double alpha = 0.2;
  double dropout = 0.5;
  bool training = false;
};

struct ForwardPass {
  Var output;
  std::vector<Var> weights;
  std::vector<Var> biases;
  Var prompts;  // invalid when no pool took part
  std::vector<std::size_t> selection;
};

/// X0 = attach(H, P[select(H)]); X_l = dropout(relu(Â·X_{l-1}·W_l)) for hidden
/// layers; the last layer is Â·X·W with no activation. dropout_rng is read only
/// in training mode with a positive rate, one mask per hidden layer.
ForwardPass forward(Tape& tape, const DenseMatrix& features, const SparseMatrix& adjacency,
                    const PromptPool* pool, const ModelParams& params, const ModelOptions& options,
                    Rng* dropout_rng);

/// Eval-mode forward returning plain values.
DenseMatrix infer(const DenseMatrix& features, const SparseMatrix& adjacency, const PromptPool* pool,
                  const ModelParams& params, const ModelOptions& options);

/// Mean cross-entropy over rows plus gamma·L_o when prompts is valid.
Var classification_loss(Tape& tape, Var logits, std::span<const std::uint32_t> labels,
                        std::span<const std::size_t> rows, Var prompts, double gamma);

double classification_loss(const DenseMatrix& logits, std::span<const std::uint32_t> labels,
                           std::span<const std::uint8_t> mask, const PromptPool* pool, double gamma);

/// -(1/N) Σ [ln σ(h·t) + ln(1 - σ(h·n))], rows of the three matrices paired.
double link_loss(const DenseMatrix& head, const DenseMatrix& tail, const DenseMatrix& neg_tail);

DenseMatrix softmax_rows(const DenseMatrix& logits);

}  // namespace pgcn
