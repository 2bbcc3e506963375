#pragma once

#include <vector>

#include "haam/model.hpp"
#include "haam/spectral.hpp"

namespace haam {

/// Largest singular value by power iteration on H^T H.
double spectral_norm_estimate(const Eigen::MatrixXd& h, int max_iterations = 1000, double tolerance = 1e-12);

struct DimensionDiagnostics {
  int dimension_id = 0;
  CoeffDiagnostics coeffs;
  double h_norm = 0.0;
  double amplification = 0.0;  // ||theta_L||_1 * ||theta_H||_1 * ||H||_2
};

std::vector<DimensionDiagnostics> diagnose(const ModelParams& params);

}  // namespace haam
