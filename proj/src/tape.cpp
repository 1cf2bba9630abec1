#include "pgcn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/kernels.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

namespace {

DenseMatrix scalar(double v) { return DenseMatrix(1, 1, v); }

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-s)); }

}  // namespace

Var Tape::leaf(DenseMatrix value, bool requires_grad) {
  if (!value.all_finite()) throw NumericalError("tape: non-finite leaf value");
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.op = requires_grad ? "leaf" : "constant";
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw InvalidArgument("tape: invalid slot");
  return nodes_[v.id];
}

const DenseMatrix& Tape::value(Var v) const { return node(v).value; }

const DenseMatrix& Tape::grad(Var v) const {
  const auto& n = node(v);
  if (n.grad.empty() && !n.value.empty()) {
    throw InvalidState("tape: no gradient for slot " + std::to_string(v.id) + " (backward not run)");
  }
  return n.grad;
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

const std::string& Tape::op_name(Var v) const { return node(v).op; }

Var Tape::record(DenseMatrix value, std::string op, std::vector<std::size_t> inputs,
                 std::function<void(Tape&, std::size_t)> backward) {
  if (!value.all_finite()) throw NumericalError("tape: non-finite output from " + op);
  Node n;
  n.value = std::move(value);
  n.op = std::move(op);
  n.requires_grad = std::any_of(inputs.begin(), inputs.end(), [&](std::size_t i) { return nodes_[i].requires_grad; });
  n.inputs = std::move(inputs);
  if (n.requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(std::size_t id, const DenseMatrix& g) {
  auto& dst = nodes_[id].grad;
  require_same_shape(dst, g, "tape gradient");
  auto out = dst.values();
  const auto in = g.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
}

void Tape::backward(Var loss) {
  const auto& l = node(loss);
  if (l.value.rows() != 1 || l.value.cols() != 1) {
    throw ContractError("backward: loss slot is " + std::to_string(l.value.rows()) + "x" +
                        std::to_string(l.value.cols()) + ", expected a scalar");
  }
  for (auto& n : nodes_) n.grad = DenseMatrix(n.value.rows(), n.value.cols());
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    auto& n = nodes_[i];
    if (n.requires_grad && n.backward) n.backward(*this, i);
  }
}

Var Tape::matmul(Var a, Var b) {
  auto out = kernels::matmul(value(a), value(b));
  return record(std::move(out), "matmul", {a.id, b.id}, [a, b](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    if (t.needs(a.id)) t.accumulate(a.id, kernels::matmul_a_bt(g, t.nodes_[b.id].value));
    if (t.needs(b.id)) t.accumulate(b.id, kernels::matmul_at_b(t.nodes_[a.id].value, g));
  });
}

Var Tape::spmm(const SparseMatrix& s, Var x) {
  if (!s.symmetric) throw ContractError("tape spmm: operator must be symmetric");
  auto out = kernels::spmm(s, value(x));
  return record(std::move(out), "spmm", {x.id}, [&s, x](Tape& t, std::size_t self) {
    // Âᵀ = Â
    t.accumulate(x.id, kernels::spmm(s, t.nodes_[self].grad));
  });
}

Var Tape::add_bias(Var x, Var bias) {
  const auto& xv = value(x);
  const auto& bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw ShapeError("add_bias: bias must be 1 x cols");
  DenseMatrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  }
  return record(std::move(out), "add_bias", {x.id, bias.id}, [x, bias](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    if (t.needs(x.id)) t.accumulate(x.id, g);
    if (t.needs(bias.id)) {
      DenseMatrix gb(1, g.cols());
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gb(0, c) += g(r, c);
      }
      t.accumulate(bias.id, gb);
    }
  });
}

Var Tape::relu(Var x) {
  DenseMatrix out = value(x);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return record(std::move(out), "relu", {x.id}, [x](Tape& t, std::size_t self) {
    DenseMatrix g = t.nodes_[self].grad;
    const auto in = t.nodes_[x.id].value.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < gv.size(); ++i) {
      if (!(in[i] > 0.0)) gv[i] = 0.0;
    }
    t.accumulate(x.id, g);
  });
}

Var Tape::dropout(Var x, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw InvalidArgument("dropout: rate must lie in [0, 1)");
  const auto& xv = value(x);
  const double keep_scale = 1.0 / (1.0 - rate);
  auto mask = kernels::dropout_mask(xv.rows(), xv.cols(), rate, rng);
  DenseMatrix out = xv;
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = mask[i] ? ov[i] * keep_scale : 0.0;
  return record(std::move(out), "dropout", {x.id},
                [x, keep_scale, mask = std::move(mask)](Tape& t, std::size_t self) {
                  DenseMatrix g = t.nodes_[self].grad;
                  auto gv = g.values();
                  for (std::size_t i = 0; i < gv.size(); ++i) gv[i] = mask[i] ? gv[i] * keep_scale : 0.0;
                  t.accumulate(x.id, g);
                });
}

Var Tape::row_softmax(Var x) {
  DenseMatrix out = value(x);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double mx = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double& v : row) {
      v = std::exp(v - mx);
      z += v;
    }
    for (double& v : row) v /= z;
  }
  return record(std::move(out), "row_softmax", {x.id}, [x](Tape& t, std::size_t self) {
    const auto& s = t.nodes_[self].value;
    const auto& g = t.nodes_[self].grad;
    DenseMatrix gx(s.rows(), s.cols());
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < s.cols(); ++c) dot += g(r, c) * s(r, c);
      for (std::size_t c = 0; c < s.cols(); ++c) gx(r, c) = s(r, c) * (g(r, c) - dot);
    }
    t.accumulate(x.id, gx);
  });
}

Var Tape::concat_cols(Var a, Var b) {
  const auto& av = value(a);
  const auto& bv = value(b);
  if (av.rows() != bv.rows()) throw ShapeError("concat_cols: row counts differ");
  DenseMatrix out(av.rows(), av.cols() + bv.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
    std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(av.cols()));
  }
  return record(std::move(out), "concat_cols", {a.id, b.id}, [a, b](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    const std::size_t ca = t.nodes_[a.id].value.cols();
    const std::size_t cb = t.nodes_[b.id].value.cols();
    if (t.needs(a.id)) {
      DenseMatrix ga(g.rows(), ca);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < ca; ++c) ga(r, c) = g(r, c);
      }
      t.accumulate(a.id, ga);
    }
    if (t.needs(b.id)) {
      DenseMatrix gb(g.rows(), cb);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < cb; ++c) gb(r, c) = g(r, ca + c);
      }
      t.accumulate(b.id, gb);
    }
  });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  DenseMatrix out = value(a);
  const auto bv = value(b).values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] += bv[i];
  return record(std::move(out), "add", {a.id, b.id}, [a, b](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    if (t.needs(a.id)) t.accumulate(a.id, g);
    if (t.needs(b.id)) t.accumulate(b.id, g);
  });
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  DenseMatrix out = value(a);
  const auto bv = value(b).values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] *= bv[i];
  return record(std::move(out), "mul", {a.id, b.id}, [a, b](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    if (t.needs(a.id)) {
      DenseMatrix ga = g;
      const auto other = t.nodes_[b.id].value.values();
      auto gv = ga.values();
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= other[i];
      t.accumulate(a.id, ga);
    }
    if (t.needs(b.id)) {
      DenseMatrix gb = g;
      const auto other = t.nodes_[a.id].value.values();
      auto gv = gb.values();
      for (std::size_t i = 0; i < gv.size(); ++i) gv[i] *= other[i];
      t.accumulate(b.id, gb);
    }
  });
}

Var Tape::affine_combine(Var a, Var b, double alpha) {
  require_same_shape(value(a), value(b), "affine_combine");
  DenseMatrix out = value(a);
  const auto bv = value(b).values();
  auto ov = out.values();
  for (std::size_t i = 0; i < ov.size(); ++i) ov[i] = alpha * ov[i] + (1.0 - alpha) * bv[i];
  return record(std::move(out), "affine_combine", {a.id, b.id}, [a, b, alpha](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    for (const auto& [id, w] : {std::pair{a.id, alpha}, std::pair{b.id, 1.0 - alpha}}) {
      if (!t.needs(id)) continue;
      DenseMatrix gi = g;
      for (double& v : gi.values()) v *= w;
      t.accumulate(id, gi);
    }
  });
}

Var Tape::scale(Var x, double factor) {
  DenseMatrix out = value(x);
  for (double& v : out.values()) v *= factor;
  return record(std::move(out), "scale", {x.id}, [x, factor](Tape& t, std::size_t self) {
    DenseMatrix g = t.nodes_[self].grad;
    for (double& v : g.values()) v *= factor;
    t.accumulate(x.id, g);
  });
}

Var Tape::gather_rows(Var src, std::span<const std::size_t> rows) {
  const auto& sv = value(src);
  DenseMatrix out(rows.size(), sv.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= sv.rows()) throw BoundsError("gather_rows: row " + std::to_string(rows[i]) + " out of range");
    std::copy(sv.row(rows[i]).begin(), sv.row(rows[i]).end(), out.row(i).begin());
  }
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return record(std::move(out), "gather_rows", {src.id}, [src, idx = std::move(idx)](Tape& t, std::size_t self) {
    const auto& g = t.nodes_[self].grad;
    auto& dst = t.nodes_[src.id].grad;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      auto drow = dst.row(idx[i]);
      const auto grow = g.row(i);
      for (std::size_t c = 0; c < drow.size(); ++c) drow[c] += grow[c];
    }
  });
}

Var Tape::sum(Var x) {
  double s = 0.0;
  for (double v : value(x).values()) s += v;
  return record(scalar(s), "sum", {x.id}, [x](Tape& t, std::size_t self) {
    const auto& xv = t.nodes_[x.id].value;
    t.accumulate(x.id, DenseMatrix(xv.rows(), xv.cols(), t.nodes_[self].grad(0, 0)));
  });
}

Var Tape::sum_squares(Var x) {
  double s = 0.0;
  for (double v : value(x).values()) s += v * v;
  return record(scalar(s), "sum_squares", {x.id}, [x](Tape& t, std::size_t self) {
    DenseMatrix g = t.nodes_[x.id].value;
    const double scale = 2.0 * t.nodes_[self].grad(0, 0);
    for (double& v : g.values()) v *= scale;
    t.accumulate(x.id, g);
  });
}

Var Tape::orthogonality(Var x) {
  const auto& p = value(x);
  DenseMatrix residual = kernels::matmul_a_bt(p, p);
  for (std::size_t i = 0; i < residual.rows(); ++i) residual(i, i) -= 1.0;
  double s = 0.0;
  for (double v : residual.values()) s += v * v;
  return record(scalar(s), "orthogonality", {x.id},
                [x, residual = std::move(residual)](Tape& t, std::size_t self) {
                  // d/dP ‖PPᵀ − I‖² = 4 (PPᵀ − I) P, the residual being symmetric.
                  DenseMatrix g = kernels::matmul(residual, t.nodes_[x.id].value);
                  const double scale = 4.0 * t.nodes_[self].grad(0, 0);
                  for (double& v : g.values()) v *= scale;
                  t.accumulate(x.id, g);
                });
}

Var Tape::softmax_cross_entropy(Var logits, std::span<const std::uint32_t> labels, std::span<const std::size_t> rows) {
  const auto& z = value(logits);
  if (rows.empty()) throw InvalidArgument("softmax_cross_entropy: no rows selected");
  if (labels.size() != z.rows()) throw ShapeError("softmax_cross_entropy: one label per logits row required");
  DenseMatrix probs(rows.size(), z.cols());
  double loss = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    if (r >= z.rows()) throw BoundsError("softmax_cross_entropy: row out of range");
    if (labels[r] >= z.cols()) throw BoundsError("softmax_cross_entropy: label out of range");
    const auto zr = z.row(r);
    const double mx = *std::max_element(zr.begin(), zr.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < zr.size(); ++c) {
      probs(i, c) = std::exp(zr[c] - mx);
      sum += probs(i, c);
    }
    for (std::size_t c = 0; c < zr.size(); ++c) probs(i, c) /= sum;
    loss += (mx + std::log(sum)) - zr[labels[r]];
  }
  const double inv = 1.0 / static_cast<double>(rows.size());
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  std::vector<std::uint32_t> targets(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) targets[i] = labels[rows[i]];
  return record(scalar(loss * inv), "softmax_cross_entropy", {logits.id},
                [logits, inv, idx = std::move(idx), targets = std::move(targets), probs = std::move(probs)](
                    Tape& t, std::size_t self) {
                  auto& dst = t.nodes_[logits.id].grad;
                  const double scale = inv * t.nodes_[self].grad(0, 0);
                  for (std::size_t i = 0; i < idx.size(); ++i) {
                    auto drow = dst.row(idx[i]);
                    for (std::size_t c = 0; c < drow.size(); ++c) {
                      drow[c] += scale * (probs(i, c) - (c == targets[i] ? 1.0 : 0.0));
                    }
                  }
                });
}

Var Tape::link_bce(Var embeddings, std::span<const std::size_t> heads, std::span<const std::size_t> tails,
                   std::span<const std::size_t> negatives) {
  const auto& z = value(embeddings);
  const std::size_t n = heads.size();
  if (n == 0) throw InvalidArgument("link_bce: no positive pairs");
  if (tails.size() != n || negatives.size() != n) throw ShapeError("link_bce: head/tail/negative counts differ");
  const auto dot = [&z](std::size_t a, std::size_t b) {
    if (a >= z.rows() || b >= z.rows()) throw BoundsError("link_bce: node index out of range");
    double s = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) s += z(a, c) * z(b, c);
    return s;
  };
  // d loss / d score for each positive and negative pair (0 where clamped).
  std::vector<double> dpos(n), dneg(n);
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fp = sigmoid(dot(heads[i], tails[i]));
    const double fn = sigmoid(dot(heads[i], negatives[i]));
    const double cp = std::clamp(fp, kLogEps, 1.0 - kLogEps);
    const double cn = std::clamp(fn, kLogEps, 1.0 - kLogEps);
    loss -= std::log(cp) + std::log(1.0 - cn);
    dpos[i] = cp == fp ? -(1.0 - fp) : 0.0;
    dneg[i] = cn == fn ? fn : 0.0;
  }
  const double inv = 1.0 / static_cast<double>(n);
  std::vector<std::size_t> h(heads.begin(), heads.end()), tl(tails.begin(), tails.end()),
      ng(negatives.begin(), negatives.end());
  return record(scalar(loss * inv), "link_bce", {embeddings.id},
                [embeddings, inv, h = std::move(h), tl = std::move(tl), ng = std::move(ng), dpos = std::move(dpos),
                 dneg = std::move(dneg)](Tape& t, std::size_t self) {
                  const auto& zv = t.nodes_[embeddings.id].value;
                  DenseMatrix g(zv.rows(), zv.cols());
                  const double scale = inv * t.nodes_[self].grad(0, 0);
                  const auto pair_grad = [&](std::size_t a, std::size_t b, double coef) {
                    for (std::size_t c = 0; c < zv.cols(); ++c) {
                      g(a, c) += coef * zv(b, c);
                      g(b, c) += coef * zv(a, c);
                    }
                  };
                  for (std::size_t i = 0; i < h.size(); ++i) {
                    pair_grad(h[i], tl[i], scale * dpos[i]);
                    pair_grad(h[i], ng[i], scale * dneg[i]);
                  }
                  t.accumulate(embeddings.id, g);
                });
}

}  // namespace pgcn
