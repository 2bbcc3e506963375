#include "haam/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "haam/error.hpp"

namespace haam {

BranchGammas branch_gammas(const GammaParams& p) {
  const int k = p.degree();
  BranchGammas out{Vector(k + 1), Vector(k + 1)};
  double prefix = 0.0;
  out.low[0] = out.high[0] = p.gamma0;
  for (int i = 1; i <= k; ++i) {
    prefix += p.gamma[i - 1];
    out.low[i] = p.gamma0 - prefix;
    out.high[i] = p.gamma0 + prefix;
  }
  return out;
}

Vector chebyshev_nodes(int degree) {
  Vector x(degree + 1);
  // Ascending in x: value j of a branch sits at the j-th lowest frequency, so the
  // nonincreasing low branch is a low-pass filter in lambda.
  for (int j = 0; j <= degree; ++j) {
    x[degree - j] = std::cos((j + 0.5) * std::numbers::pi / (degree + 1));
  }
  return x;
}

Eigen::MatrixXd chebyshev_interpolation_matrix(int degree) {
  if (degree < 0) throw InvalidInput("chebyshev_interpolation_matrix: negative degree");
  const Vector x = chebyshev_nodes(degree);
  const int n = degree + 1;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    double t_prev = 1.0;
    double t = x[j];
    m(0, j) = 1.0 / n;
    for (int k = 1; k < n; ++k) {
      m(k, j) = 2.0 / n * t;
      const double t_next = 2.0 * x[j] * t - t_prev;
      t_prev = t;
      t = t_next;
    }
  }
  return m;
}

BranchCoeffs gamma_to_theta(const Vector& branch_gamma, Branch branch) {
  if (branch_gamma.size() == 0) throw InvalidInput("gamma_to_theta: empty gamma vector");
  if (!branch_gamma.allFinite()) throw NumericError("gamma_to_theta: non-finite gamma");
  const int degree = static_cast<int>(branch_gamma.size()) - 1;
  return {chebyshev_interpolation_matrix(degree) * branch_gamma, branch};
}

Vector compose_product(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) throw InvalidInput("compose_product: empty coefficient vector");
  const Index na = a.size();
  const Index nb = b.size();
  Vector out = Vector::Zero(na + nb - 1);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < nb; ++j) {
      const double half = 0.5 * a[i] * b[j];
      out[i + j] += half;
      out[std::abs(i - j)] += half;
    }
  }
  return out;
}

ComposedCoeffs compose_product(const BranchCoeffs& low, const BranchCoeffs& high) {
  if (low.theta.size() != high.theta.size()) {
    throw InvalidInput("compose_product: branch lengths differ");
  }
  return {compose_product(low.theta, high.theta)};
}

void compose_product_backward(const Vector& low, const Vector& high, const Vector& grad_bar, Vector& grad_low,
                              Vector& grad_high) {
  const Index na = low.size();
  const Index nb = high.size();
  grad_low.setZero(na);
  grad_high.setZero(nb);
  for (Index i = 0; i < na; ++i) {
    for (Index j = 0; j < nb; ++j) {
      const double g = 0.5 * (grad_bar[i + j] + grad_bar[std::abs(i - j)]);
      grad_low[i] += g * high[j];
      grad_high[j] += g * low[i];
    }
  }
}

Vector branch_gammas_backward(const Vector& grad_low, const Vector& grad_high) {
  const Index k = grad_low.size() - 1;
  Vector grad(k);
  double suffix = 0.0;
  for (Index i = k; i >= 1; --i) {
    suffix += grad_high[i] - grad_low[i];
    grad[i - 1] = suffix;
  }
  return grad;
}

FilterCoeffs filter_coeffs(const GammaParams& p) {
  const BranchGammas bg = branch_gammas(p);
  const Eigen::MatrixXd m = chebyshev_interpolation_matrix(p.degree());
  FilterCoeffs fc;
  fc.theta_low = m * bg.low;
  fc.theta_high = m * bg.high;
  fc.theta_bar = compose_product(fc.theta_low, fc.theta_high);
  return fc;
}

Vector filter_coeffs_backward(const GammaParams& p, const FilterCoeffs& fc, const Vector& grad_bar) {
  Vector grad_theta_low;
  Vector grad_theta_high;
  compose_product_backward(fc.theta_low, fc.theta_high, grad_bar, grad_theta_low, grad_theta_high);
  const Eigen::MatrixXd m = chebyshev_interpolation_matrix(p.degree());
  return branch_gammas_backward(m.transpose() * grad_theta_low, m.transpose() * grad_theta_high);
}

Matrix apply_cheb(const Vector& coeffs, const CsrMatrix& lap, const Matrix& signal) {
  if (signal.rows() != lap.rows) {
    throw InvalidInput("apply_cheb: signal has " + std::to_string(signal.rows()) + " rows, operator has " +
                       std::to_string(lap.rows));
  }
  if (coeffs.size() == 0) return Matrix::Zero(signal.rows(), signal.cols());

  Matrix out = coeffs[0] * signal;
  if (coeffs.size() == 1) return out;

  Matrix t_prev = signal;
  Matrix t_curr = lap * signal;
  out.noalias() += coeffs[1] * t_curr;
  Matrix t_next;
  for (Index r = 2; r < coeffs.size(); ++r) {
    lap.multiply(t_curr, t_next);
    t_next = 2.0 * t_next - t_prev;
    out.noalias() += coeffs[r] * t_next;
    std::swap(t_prev, t_curr);
    std::swap(t_curr, t_next);
  }
  return out;
}

Matrix apply_cheb(const Vector& coeffs, const RescaledLaplacian& lap, const Matrix& signal) {
  return apply_cheb(coeffs, lap.matrix, signal);
}

Vector cheb_inner_products(const CsrMatrix& lap, const Matrix& signal, const Matrix& probe, int degree) {
  if (signal.rows() != lap.rows || probe.rows() != signal.rows() || probe.cols() != signal.cols()) {
    throw InvalidInput("cheb_inner_products: shape mismatch");
  }
  Vector out(degree + 1);
  out[0] = signal.cwiseProduct(probe).sum();
  if (degree == 0) return out;
  Matrix t_prev = signal;
  Matrix t_curr = lap * signal;
  out[1] = t_curr.cwiseProduct(probe).sum();
  Matrix t_next;
  for (int r = 2; r <= degree; ++r) {
    lap.multiply(t_curr, t_next);
    t_next = 2.0 * t_next - t_prev;
    out[r] = t_next.cwiseProduct(probe).sum();
    std::swap(t_prev, t_curr);
    std::swap(t_curr, t_next);
  }
  return out;
}

double cheb_eval(const Vector& coeffs, double x) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (Index k = coeffs.size() - 1; k >= 1; --k) {
    const double b0 = coeffs[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double c0 = coeffs.size() > 0 ? coeffs[0] : 0.0;
  return c0 + x * b1 - b2;
}

Vector eval_response(const Vector& coeffs, std::span<const double> lambda_grid, double lambda_max) {
  if (!(lambda_max > 0.0)) throw InvalidInput("eval_response: lambda_max must be positive");
  Vector out(static_cast<Index>(lambda_grid.size()));
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    if (!(lambda >= 0.0 && lambda <= lambda_max)) {
      throw InvalidInput("eval_response: grid value " + std::to_string(lambda) + " outside [0, " +
                         std::to_string(lambda_max) + "]");
    }
    out[static_cast<Index>(i)] = cheb_eval(coeffs, 2.0 * lambda / lambda_max - 1.0);
  }
  return out;
}

CoeffDiagnostics coeff_l1_diagnostics(const Vector& low, const Vector& high, const Vector& composed) {
  CoeffDiagnostics d;
  d.l1_low = low.lpNorm<1>();
  d.l1_high = high.lpNorm<1>();
  d.l1_composed = composed.lpNorm<1>();
  d.bound_satisfied = d.l1_composed <= d.l1_low * d.l1_high + 1e-9;
  return d;
}

}  // namespace haam
