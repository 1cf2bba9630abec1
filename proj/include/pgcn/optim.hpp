#pragma once

#include <cstdint>

#include "pgcn/dense.hpp"

namespace pgcn {

struct AdamOptions {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // L2 term folded into the gradient
};

/// Moment estimates for one parameter block.
struct AdamState {
  DenseMatrix m;
  DenseMatrix v;
  std::uint64_t step = 0;
};

void adam_step(DenseMatrix& param, const DenseMatrix& grad, AdamState& state, const AdamOptions& options);

}  // namespace pgcn
