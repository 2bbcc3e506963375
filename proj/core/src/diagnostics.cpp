#include "haam/diagnostics.hpp"

#include <cmath>

namespace haam {

double spectral_norm_estimate(const Eigen::MatrixXd& h, int max_iterations, double tolerance) {
  if (h.size() == 0) return 0.0;
  const Eigen::MatrixXd gram = h.transpose() * h;
  Vector v = Vector::Ones(gram.cols()) / std::sqrt(static_cast<double>(gram.cols()));
  // A constant start vector can be orthogonal to the top singular vector; perturb it deterministically.
  for (Index i = 0; i < v.size(); ++i) v[i] += 1e-3 * static_cast<double>(i + 1);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    const double next = v.dot(w);
    v = w / norm;
    if (std::abs(next - estimate) <= tolerance * std::max(next, 1e-300)) {
      estimate = next;
      break;
    }
    estimate = next;
  }
  return std::sqrt(std::max(estimate, 0.0));
}

std::vector<DimensionDiagnostics> diagnose(const ModelParams& params) {
  std::vector<DimensionDiagnostics> out;
  for (int d = 0; d < params.n_dims(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    const FilterCoeffs fc = filter_coeffs(params.gammas[ud]);
    DimensionDiagnostics dd;
    dd.dimension_id = d;
    dd.coeffs = coeff_l1_diagnostics(fc.theta_low, fc.theta_high, fc.theta_bar);
    dd.h_norm = spectral_norm_estimate(params.compat[ud].h);
    dd.amplification = dd.coeffs.l1_low * dd.coeffs.l1_high * dd.h_norm;
    out.push_back(dd);
  }
  return out;
}

}  // namespace haam
