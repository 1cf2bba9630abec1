#pragma once

// Dense and sparse-dense kernels. The top-level functions parallelize over
// output rows with OpenMP; kernels::serial keeps the plain loops they are
// tested against. Both accumulate every output element in the same order, so
// results are bit-identical regardless of thread count.

#include <cstdint>
#include <vector>

#include "pgcn/dense.hpp"
#include "pgcn/sparse.hpp"

namespace pgcn {
class Rng;
}

namespace pgcn::kernels {

namespace serial {

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// aᵀ·b
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
/// a·bᵀ
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x);

}  // namespace serial

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& x);

/// Keep-mask for inverted dropout, drawn entry by entry in row-major order.
std::vector<std::uint8_t> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng);

int max_threads() noexcept;
void set_num_threads(int n) noexcept;

}  // namespace pgcn::kernels
