#pragma once

#include <span>

#include "haam/csr.hpp"
#include "haam/graph.hpp"
#include "haam/types.hpp"

namespace haam {

/// Learnable spectral parameters of one dimension. `gamma0` is fixed; the K
/// entries of `gamma` are kept nonnegative by projection during training.
struct GammaParams {
  double gamma0 = 1.0;
  Vector gamma;
  int dimension_id = 0;

  int degree() const { return static_cast<int>(gamma.size()); }
};

enum class Branch { LowPass, HighPass };

struct BranchCoeffs {
  Vector theta;  // K + 1 Chebyshev coefficients
  Branch branch = Branch::LowPass;
};

/// Coefficients of the product of two degree-K Chebyshev series (degree 2K).
struct ComposedCoeffs {
  Vector theta_bar;
};

/// Values the low/high branch filters take at the K + 1 Chebyshev nodes.
struct BranchGammas {
  Vector low;
  Vector high;
};

/// low_i = gamma0 - sum_{j<=i} gamma_j,  high_i = gamma0 + sum_{j<=i} gamma_j.
BranchGammas branch_gammas(const GammaParams& p);

/// The K + 1 Chebyshev nodes cos((j + 1/2) pi / (K + 1)), sorted ascending.
Vector chebyshev_nodes(int degree);

/// (K+1) x (K+1) matrix M with theta = M * gamma. Row 0 uses weight 1/(K+1),
/// rows k >= 1 use 2/(K+1), so the series interpolates gamma at the nodes.
Eigen::MatrixXd chebyshev_interpolation_matrix(int degree);

BranchCoeffs gamma_to_theta(const Vector& branch_gamma, Branch branch = Branch::LowPass);

/// Product-to-sum: T_i T_j = (T_{i+j} + T_{|i-j|}) / 2.
ComposedCoeffs compose_product(const BranchCoeffs& low, const BranchCoeffs& high);
Vector compose_product(const Vector& a, const Vector& b);

/// Sum_r coeffs_r T_r(lap) * signal via the three-term recurrence on panels.
Matrix apply_cheb(const Vector& coeffs, const CsrMatrix& lap, const Matrix& signal);
Matrix apply_cheb(const Vector& coeffs, const RescaledLaplacian& lap, const Matrix& signal);

/// <T_r(lap) signal, probe>_F for r = 0..degree. This is the gradient of
/// <apply_cheb(c, lap, signal), probe> with respect to c.
Vector cheb_inner_products(const CsrMatrix& lap, const Matrix& signal, const Matrix& probe, int degree);

/// Clenshaw evaluation of a Chebyshev series at a scalar x.
double cheb_eval(const Vector& coeffs, double x);

/// Series evaluated at lambda_tilde = 2 lambda / lambda_max - 1 for every
/// lambda in the grid. Throws InvalidInput when lambda lies outside [0, lambda_max].
Vector eval_response(const Vector& coeffs, std::span<const double> lambda_grid, double lambda_max);

struct CoeffDiagnostics {
  double l1_low = 0.0;
  double l1_high = 0.0;
  double l1_composed = 0.0;
  bool bound_satisfied = true;  // l1_composed <= l1_low * l1_high + 1e-9
};

CoeffDiagnostics coeff_l1_diagnostics(const Vector& low, const Vector& high, const Vector& composed);

// Reverse-mode pieces used by the trainer.

/// Given d/d theta_bar, accumulates d/d theta_low and d/d theta_high.
void compose_product_backward(const Vector& low, const Vector& high, const Vector& grad_bar, Vector& grad_low,
                              Vector& grad_high);

/// Given d/d low and d/d high (each K + 1), returns d/d gamma (length K).
Vector branch_gammas_backward(const Vector& grad_low, const Vector& grad_high);

/// Full forward chain gamma -> (theta_low, theta_high, theta_bar) for one dimension.
struct FilterCoeffs {
  Vector theta_low;
  Vector theta_high;
  Vector theta_bar;
};

FilterCoeffs filter_coeffs(const GammaParams& p);

/// Chain rule of filter_coeffs: d/d theta_bar -> d/d gamma.
Vector filter_coeffs_backward(const GammaParams& p, const FilterCoeffs& fc, const Vector& grad_bar);

}  // namespace haam
