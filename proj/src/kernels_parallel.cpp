#include <cstddef>

#include "kernels_common.hpp"
#include "pgcn/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pgcn::kernels {

namespace {

// Below this many multiply-adds the fork/join costs more than it saves.
constexpr std::size_t kParallelWork = 1 << 14;

}  // namespace

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_num_threads(int n) noexcept {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul(a, b);
  DenseMatrix out(a.rows(), b.cols());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t inner = a.cols();
  const std::size_t cols = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
#pragma omp parallel for schedule(static) if (a.rows() * inner * cols > kParallelWork)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* orow = po + static_cast<std::size_t>(i) * cols;
    const double* arow = pa + static_cast<std::size_t>(i) * inner;
    for (std::size_t k = 0; k < inner; ++k) {
      const double aik = arow[k];
      const double* brow = pb + k * cols;
      for (std::size_t j = 0; j < cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul_at_b(a, b);
  DenseMatrix out(a.cols(), b.cols());
  const auto out_rows = static_cast<std::ptrdiff_t>(a.cols());
  const std::size_t n = a.rows();
  const std::size_t acols = a.cols();
  const std::size_t cols = b.cols();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
#pragma omp parallel for schedule(static) if (n * acols * cols > kParallelWork)
  for (std::ptrdiff_t i = 0; i < out_rows; ++i) {
    double* orow = po + static_cast<std::size_t>(i) * cols;
    for (std::size_t r = 0; r < n; ++r) {
      const double ari = pa[r * acols + static_cast<std::size_t>(i)];
      const double* brow = pb + r * cols;
      for (std::size_t j = 0; j < cols; ++j) orow[j] += ari * brow[j];
    }
  }
  return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  detail::check_matmul_a_bt(a, b);
  DenseMatrix out(a.rows(), b.rows());
  const auto rows = static_cast<std::ptrdiff_t>(a.rows());
  const std::size_t inner = a.cols();
  const std::size_t brows = b.rows();
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
#pragma omp parallel for schedule(static) if (a.rows() * inner * brows > kParallelWork)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const double* arow = pa + static_cast<std::size_t>(i) * inner;
    for (std::size_t j = 0; j < brows; ++j) {
      const double* brow = pb + j * inner;
      double s = 0.0;
      for (std::size_t k = 0; k < inner; ++k) s += arow[k] * brow[k];
      po[static_cast<std::size_t>(i) * brows + j] = s;
    }
  }
  return out;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x) {
  detail::check_spmm(s, x);
  DenseMatrix out(s.n, x.cols());
  const auto rows = static_cast<std::ptrdiff_t>(s.n);
  const std::size_t cols = x.cols();
  const double* px = x.data();
  double* po = out.data();
#pragma omp parallel for schedule(dynamic, 64) if (s.nnz() * cols > kParallelWork)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    double* orow = po + static_cast<std::size_t>(i) * cols;
    const auto ui = static_cast<std::size_t>(i);
    for (std::size_t e = s.offsets[ui]; e < s.offsets[ui + 1]; ++e) {
      const double v = s.values[e];
      const double* xrow = px + static_cast<std::size_t>(s.cols[e]) * cols;
      for (std::size_t j = 0; j < cols; ++j) orow[j] += v * xrow[j];
    }
  }
  return out;
}

}  // namespace pgcn::kernels
