#pragma once

#include <vector>

#include "haam/types.hpp"

namespace haam {

/// Compressed sparse row matrix with explicit values.
struct CsrMatrix {
  Index rows = 0;
  Index cols = 0;
  std::vector<Index> row_ptr;  // size rows + 1
  std::vector<Index> col_idx;
  std::vector<double> values;

  Index nnz() const { return static_cast<Index>(values.size()); }

  /// out = this * in, where `in` has `cols` rows. `out` is resized.
  void multiply(const Matrix& in, Matrix& out) const;
  Matrix operator*(const Matrix& in) const;

  Eigen::MatrixXd to_dense() const;
};

}  // namespace haam
