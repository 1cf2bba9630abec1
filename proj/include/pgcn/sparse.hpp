#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pgcn {

/// Square CSR matrix with real values; used for the normalized adjacency.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> offsets;  // length n+1
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  bool symmetric = false;

  std::size_t nnz() const noexcept { return cols.size(); }
  std::span<const std::uint32_t> row_cols(std::size_t r) const noexcept {
    return {cols.data() + offsets[r], offsets[r + 1] - offsets[r]};
  }
  std::span<const double> row_values(std::size_t r) const noexcept {
    return {values.data() + offsets[r], offsets[r + 1] - offsets[r]};
  }
  /// Entry lookup by binary search; 0 when absent.
  double at(std::size_t r, std::size_t c) const noexcept;
};

}  // namespace pgcn
