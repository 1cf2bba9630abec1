#include "pgcn/optim.hpp"

#include <cmath>

#include "pgcn/error.hpp"

namespace pgcn {

void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state, const AdamOptions& options) {
  require_same_shape(param, grad, "adam_step");
  if (state.m.empty() && !param.empty()) {
    state.m = DenseMatrix(param.rows(), param.cols());
    state.v = DenseMatrix(param.rows(), param.cols());
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(options.beta1, t);
  const double bc2 = 1.0 - std::pow(options.beta2, t);
  auto p = param.values();
  const auto g = grad.values();
  auto m = state.m.values();
  auto v = state.v.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i] + options.weight_decay * p[i];
    m[i] = options.beta1 * m[i] + (1.0 - options.beta1) * gi;
    v[i] = options.beta2 * v[i] + (1.0 - options.beta2) * gi * gi;
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    p[i] -= options.lr * m_hat / (std::sqrt(v_hat) + options.eps);
  }
}

}  // namespace pgcn
