#pragma once

#include <string>

#include "pgcn/dense.hpp"
#include "pgcn/error.hpp"
#include "pgcn/sparse.hpp"

namespace pgcn::kernels::detail {

inline void check_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " times " +
                     std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

inline void check_matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) {
    throw ShapeError("matmul_at_b: row counts " + std::to_string(a.rows()) + " and " + std::to_string(b.rows()));
  }
}

inline void check_matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_a_bt: column counts " + std::to_string(a.cols()) + " and " +
                     std::to_string(b.cols()));
  }
}

inline void check_spmm(const SparseMatrix& s, const DenseMatrix& x) {
  if (s.n != x.rows()) {
    throw ShapeError("spmm: " + std::to_string(s.n) + "x" + std::to_string(s.n) + " operator on " +
                     std::to_string(x.rows()) + " rows");
  }
}

}  // namespace pgcn::kernels::detail
