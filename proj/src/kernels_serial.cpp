#include "kernels_common.hpp"
#include "pgcn/kernels.hpp"
#include "pgcn/rng.hpp"

namespace pgcn::kernels {

namespace serial {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul(a, b);
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul_at_b(a, b);
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double ari = a(r, i);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += ari * b(r, j);
    }
  }
  return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul_a_bt(a, b);
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(j, k);
      out(i, j) = s;
    }
  }
  return out;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x) {
  detail::check_spmm(s, x);
  DenseMatrix out(s.n, x.cols());
  for (std::size_t i = 0; i < s.n; ++i) {
    for (std::size_t e = s.offsets[i]; e < s.offsets[i + 1]; ++e) {
      const double v = s.values[e];
      const std::size_t src = s.cols[e];
      for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) += v * x(src, j);
    }
  }
  return out;
}

}  // namespace serial

std::vector<std::uint8_t> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  std::vector<std::uint8_t> keep(rows * cols);
  for (auto& k : keep) k = rng.uniform() >= rate ? 1 : 0;
  return keep;
}

}  // namespace pgcn::kernels
