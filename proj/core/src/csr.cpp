#include "haam/csr.hpp"

#include "haam/error.hpp"

namespace haam {

void CsrMatrix::multiply(const Matrix& in, Matrix& out) const {
  if (in.rows() != cols) {
    throw InvalidInput("csr multiply: operand has " + std::to_string(in.rows()) +
                       " rows, expected " + std::to_string(cols));
  }
  out.setZero(rows, in.cols());
  for (Index i = 0; i < rows; ++i) {
    auto dst = out.row(i);
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      dst.noalias() += values[p] * in.row(col_idx[p]);
    }
  }
}

Matrix CsrMatrix::operator*(const Matrix& in) const {
  Matrix out;
  multiply(in, out);
  return out;
}

Eigen::MatrixXd CsrMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) dense(i, col_idx[p]) += values[p];
  }
  return dense;
}

}  // namespace haam
