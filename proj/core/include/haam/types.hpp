#pragma once

#include <Eigen/Dense>

namespace haam {

using Index = Eigen::Index;

/// Dense node-major panel (N rows, one column per class or feature).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

}  // namespace haam
