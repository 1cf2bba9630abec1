#include "pgcn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

std::vector<std::size_t> ModelParams::widths() const {
  std::vector<std::size_t> out;
  if (weights.empty()) return out;
  out.push_back(weights.front().rows());
  for (const auto& w : weights) out.push_back(w.cols());
  return out;
}

std::size_t ModelParams::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& w : weights) total += w.size();
  for (const auto& b : biases) total += b.size();
  return total;
}

void ModelParams::validate() const {
  if (weights.empty()) throw ShapeError("model: no layers");
  for (std::size_t l = 1; l < weights.size(); ++l) {
    if (weights[l].rows() != weights[l - 1].cols()) {
      throw ShapeError("model: layer " + std::to_string(l) + " expects width " + std::to_string(weights[l].rows()) +
                       " but receives " + std::to_string(weights[l - 1].cols()));
    }
  }
  if (!biases.empty()) {
    if (biases.size() != weights.size()) throw ShapeError("model: bias count != layer count");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      if (biases[l].rows() != 1 || biases[l].cols() != weights[l].cols()) {
        throw ShapeError("model: bias of layer " + std::to_string(l) + " has wrong shape");
      }
    }
  }
}

std::vector<std::size_t> layer_widths(std::size_t input_width, std::size_t hidden, std::size_t output,
                                      std::size_t layers) {
  if (layers == 0) throw InvalidArgument("layer_widths: at least one layer required");
  std::vector<std::size_t> widths{input_width};
  for (std::size_t l = 1; l < layers; ++l) widths.push_back(hidden);
  widths.push_back(output);
  return widths;
}

ModelParams init_params(std::span<const std::size_t> widths, bool bias, std::uint64_t seed) {
  if (widths.size() < 2) throw InvalidArgument("init_params: need at least input and output widths");
  Rng rng(seed);
  ModelParams params;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t in = widths[l];
    const std::size_t out = widths[l + 1];
    if (in == 0 || out == 0) throw InvalidArgument("init_params: zero layer width");
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseMatrix w(in, out);
    for (double& v : w.values()) v = (2.0 * rng.uniform() - 1.0) * limit;
    params.weights.push_back(std::move(w));
    if (bias) params.biases.emplace_back(1, out);
  }
  return params;
}

SparseMatrix normalize_adjacency(const Graph& g) {
  const std::size_t n = g.num_nodes();
  SparseMatrix s;
  s.n = n;
  s.symmetric = true;
  s.offsets.assign(n + 1, 0);
  s.cols.reserve(g.num_arcs() + n);
  s.values.reserve(g.num_arcs() + n);
  std::vector<double> inv_sqrt(n);
  for (NodeId v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  for (NodeId i = 0; i < n; ++i) {
    bool self_done = false;
    for (NodeId j : g.neighbors(i)) {
      if (!self_done && j > i) {
        s.cols.push_back(i);
        s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
        self_done = true;
      }
      s.cols.push_back(j);
      s.values.push_back(inv_sqrt[i] * inv_sqrt[j]);
    }
    if (!self_done) {
      s.cols.push_back(i);
      s.values.push_back(inv_sqrt[i] * inv_sqrt[i]);
    }
    s.offsets[i + 1] = s.cols.size();
  }
  return s;
}

ForwardPass forward(Tape& tape, const DenseMatrix& features, const SparseMatrix& adjacency, const PromptPool* pool,
                    const ModelParams& params, const ModelOptions& options, Rng* dropout_rng) {
  params.validate();
  if (features.rows() != adjacency.n) throw ShapeError("forward: feature rows != subgraph size");

  ForwardPass pass;
  Var x = tape.constant(features);
  if (pool != nullptr) {
    pass.selection = select_prompts(features, *pool);
    pass.prompts = tape.leaf(pool->values());
    const Var chosen = tape.gather_rows(pass.prompts, pass.selection);
    switch (options.mode) {
      case AttachMode::concat: x = tape.concat_cols(x, chosen); break;
      case AttachMode::add: x = tape.add(x, chosen); break;
      case AttachMode::mul: x = tape.mul(x, chosen); break;
      case AttachMode::weighted:
        if (!(options.alpha >= 0.0 && options.alpha <= 1.0)) throw InvalidArgument("forward: alpha must lie in [0, 1]");
        x = tape.affine_combine(x, chosen, options.alpha);
        break;
    }
  }
  if (tape.value(x).cols() != params.weights.front().rows()) {
    throw ShapeError("forward: input width " + std::to_string(tape.value(x).cols()) + " but first layer expects " +
                     std::to_string(params.weights.front().rows()));
  }

  const bool drop = options.training && options.dropout > 0.0;
  if (drop && dropout_rng == nullptr) throw InvalidArgument("forward: training with dropout needs an Rng");
  const std::size_t k = params.num_layers();
  for (std::size_t l = 0; l < k; ++l) {
    const Var w = tape.leaf(params.weights[l]);
    pass.weights.push_back(w);
    x = tape.spmm(adjacency, tape.matmul(x, w));
    if (params.has_bias()) {
      const Var b = tape.leaf(params.biases[l]);
      pass.biases.push_back(b);
      x = tape.add_bias(x, b);
    }
    if (l + 1 < k) {
      x = tape.relu(x);
      if (drop) x = tape.dropout(x, options.dropout, *dropout_rng);
    }
  }
  pass.output = x;
  return pass;
}

DenseMatrix infer(const DenseMatrix& features, const SparseMatrix& adjacency, const PromptPool* pool,
                  const ModelParams& params, const ModelOptions& options) {
  Tape tape;
  ModelOptions eval = options;
  eval.training = false;
  const auto pass = forward(tape, features, adjacency, pool, params, eval, nullptr);
  return tape.value(pass.output);
}

Var classification_loss(Tape& tape, Var logits, std::span<const std::uint32_t> labels,
                        std::span<const std::size_t> rows, Var prompts, double gamma) {
  if (rows.empty()) throw InvalidArgument("classification_loss: empty mask");
  Var loss = tape.softmax_cross_entropy(logits, labels, rows);
  if (prompts.valid()) loss = tape.add(loss, tape.scale(tape.orthogonality(prompts), gamma));
  return loss;
}

double classification_loss(const DenseMatrix& logits, std::span<const std::uint32_t> labels,
                           std::span<const std::uint8_t> mask, const PromptPool* pool, double gamma) {
  if (mask.size() != logits.rows()) throw ShapeError("classification_loss: mask length != logits rows");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) rows.push_back(i);
  }
  Tape tape;
  const Var z = tape.constant(logits);
  const Var p = pool != nullptr ? tape.constant(pool->values()) : Var{};
  return tape.value(classification_loss(tape, z, labels, rows, p, gamma))(0, 0);
}

double link_loss(const DenseMatrix& head, const DenseMatrix& tail, const DenseMatrix& neg_tail) {
  require_same_shape(head, tail, "link_loss");
  require_same_shape(head, neg_tail, "link_loss");
  const std::size_t n = head.rows();
  if (n == 0) throw InvalidArgument("link_loss: no links");
  const auto score = [](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
    return std::clamp(1.0 / (1.0 + std::exp(-s)), Tape::kLogEps, 1.0 - Tape::kLogEps);
  };
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    loss -= std::log(score(head.row(i), tail.row(i))) + std::log(1.0 - score(head.row(i), neg_tail.row(i)));
  }
  return loss / static_cast<double>(n);
}

DenseMatrix softmax_rows(const DenseMatrix& logits) {
  Tape tape;
  return tape.value(tape.row_softmax(tape.constant(logits)));
}

}  // namespace pgcn
