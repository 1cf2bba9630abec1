#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pgcn/dense.hpp"
#include "pgcn/sparse.hpp"

namespace pgcn {

class Rng;

/// Handle to a slot on a Tape.
struct Var {
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
  std::size_t id = npos;

  bool valid() const noexcept { return id != npos; }
};

/// Reverse-mode tape for the fixed set of primitives the GCN needs.
///
/// Slots are appended in execution order, so inputs always precede the op
/// that reads them; backward() walks the slots in exact reverse. Every op
/// checks that its output is finite and throws NumericalError otherwise.
/// A tape is single-use and confined to one thread.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(DenseMatrix value, bool requires_grad = true);
  Var constant(DenseMatrix value) { return leaf(std::move(value), false); }

  const DenseMatrix& value(Var v) const;
  /// Gradient of the last backward() loss; zeros for slots it did not reach.
  const DenseMatrix& grad(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  const std::string& op_name(Var v) const;

  /// Seeds d(loss)/d(loss) = 1 and propagates. The loss slot must be 1×1.
  void backward(Var loss);

  Var matmul(Var a, Var b);
  /// s must be symmetric and outlive the tape.
  Var spmm(const SparseMatrix& s, Var x);
  /// x (n×f) plus a 1×f bias broadcast over rows.
  Var add_bias(Var x, Var bias);
  Var relu(Var x);
  /// Inverted dropout; kept entries are scaled by 1/(1-rate). rate in [0,1).
  Var dropout(Var x, double rate, Rng& rng);
  Var row_softmax(Var x);
  Var concat_cols(Var a, Var b);
  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  /// alpha·a + (1-alpha)·b
  Var affine_combine(Var a, Var b, double alpha);
  Var scale(Var x, double factor);
  /// out[i] = src[rows[i]]; backward scatter-adds into src.
  Var gather_rows(Var src, std::span<const std::size_t> rows);

  // Reductions to a 1×1 slot.
  Var sum(Var x);
  Var sum_squares(Var x);
  /// ‖x·xᵀ − I‖²_F
  Var orthogonality(Var x);
  /// Mean softmax cross-entropy over the listed rows.
  Var softmax_cross_entropy(Var logits, std::span<const std::uint32_t> labels,
                            std::span<const std::size_t> rows);
  /// Binary cross-entropy on sigmoid(dot) scores of (head, tail) positives and
  /// (head, neg) negatives, averaged over the number of positives. Scores are
  /// clamped to [eps, 1-eps] before the log.
  Var link_bce(Var embeddings, std::span<const std::size_t> heads, std::span<const std::size_t> tails,
               std::span<const std::size_t> negatives);

  static constexpr double kLogEps = 1e-12;

 private:
  struct Node {
    DenseMatrix value;
    DenseMatrix grad;
    bool requires_grad = false;
    std::string op;
    std::vector<std::size_t> inputs;
    std::function<void(Tape&, std::size_t)> backward;
  };

  Var record(DenseMatrix value, std::string op, std::vector<std::size_t> inputs,
             std::function<void(Tape&, std::size_t)> backward);
  const Node& node(Var v) const;
  DenseMatrix& grad_of(std::size_t id) { return nodes_[id].grad; }
  bool needs(std::size_t id) const { return nodes_[id].requires_grad; }
  void accumulate(std::size_t id, const DenseMatrix& g);

  std::vector<Node> nodes_;
};

}  // namespace pgcn
