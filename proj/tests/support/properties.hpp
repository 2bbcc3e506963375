#pragma once

// Randomized property checks shared by the unit tests and the acceptance
// suite. Each returns the worst observed slack so callers can report it.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "haam/graph.hpp"
#include "haam/model.hpp"
#include "haam/spectral.hpp"
#include "oracles.hpp"

namespace haam::props {

struct Instance {
  Eigen::MatrixXd lap;  // dense rescaled Laplacian
  RescaledLaplacian sparse;
  Eigen::VectorXd theta_low;
  Eigen::VectorXd theta_high;
};

inline Eigen::VectorXd random_coeffs(int size, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> unif(-scale, scale);
  Eigen::VectorXd c(size);
  for (int i = 0; i < size; ++i) c[i] = unif(rng);
  return c;
}

inline Instance random_instance(std::mt19937_64& rng, int max_nodes = 30, int max_k = 4) {
  std::uniform_int_distribution<int> size(2, max_nodes);
  std::uniform_int_distribution<int> degree(0, max_k);
  std::uniform_real_distribution<double> density(0.05, 0.5);
  const auto g = oracle::random_graph(size(rng), density(rng), rng);
  Instance inst;
  inst.sparse = build_rescaled_laplacian(g);
  inst.lap = inst.sparse.matrix.to_dense();
  const int k = degree(rng);
  inst.theta_low = random_coeffs(k + 1, rng);
  inst.theta_high = random_coeffs(k + 1, rng);
  return inst;
}

inline double relative_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = std::max(b.norm(), 1e-300);
  return (a - b).norm() / denom;
}

/// Dense f_L(L) f_H(L) against the composed series; returns the relative Frobenius error.
inline double product_expansion_error(const Instance& inst) {
  const Eigen::MatrixXd product =
      oracle::dense_cheb_poly(inst.theta_low, inst.lap) * oracle::dense_cheb_poly(inst.theta_high, inst.lap);
  const Eigen::VectorXd bar = compose_product(inst.theta_low, inst.theta_high);
  if (product.norm() == 0.0) return oracle::dense_cheb_poly(bar, inst.lap).norm();
  return relative_frobenius(oracle::dense_cheb_poly(bar, inst.lap), product);
}

inline double commutator_norm(const Eigen::MatrixXd& lap, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::MatrixXd fa = oracle::dense_cheb_poly(a, lap);
  const Eigen::MatrixXd fb = oracle::dense_cheb_poly(b, lap);
  return (fb * fa - fa * fb).norm();
}

/// max_i |eig_i(f_L f_H) - f_L(lambda_i) f_H(lambda_i)| in the eigenbasis of L.
inline double spectral_composition_error(const Eigen::MatrixXd& lap, const Eigen::VectorXd& a,
                                         const Eigen::VectorXd& b) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const Eigen::MatrixXd& u = es.eigenvectors();
  const Eigen::MatrixXd composed = oracle::dense_cheb_poly(a, lap) * oracle::dense_cheb_poly(b, lap);
  const Eigen::MatrixXd in_basis = u.transpose() * composed * u;
  double worst = 0.0;
  for (Index i = 0; i < lap.rows(); ++i) {
    const double lambda = es.eigenvalues()[i];
    const double expected = oracle::cheb_scalar(a, lambda) * oracle::cheb_scalar(b, lambda);
    for (Index j = 0; j < lap.rows(); ++j) {
      const double target = i == j ? expected : 0.0;
      worst = std::max(worst, std::abs(in_basis(i, j) - target));
    }
  }
  return worst;
}

/// max_k (||T_k(L)||_2 - 1) for k <= degree.
inline double cheb_basis_norm_excess(const Eigen::MatrixXd& lap, int degree) {
  double worst = -1.0;
  for (const auto& t : oracle::dense_cheb_basis(lap, degree)) worst = std::max(worst, oracle::spectral_norm(t) - 1.0);
  return worst;
}

/// ||f(L)||_2 - sum |alpha_k|.
inline double bibo_excess(const Eigen::MatrixXd& lap, const Eigen::VectorXd& alpha) {
  return oracle::spectral_norm(oracle::dense_cheb_poly(alpha, lap)) - alpha.lpNorm<1>();
}

/// Operator form of the composed-filter bound: ||f_L f_H||_2 - ||theta_L||_1 ||theta_H||_1,
/// and the coefficient form ||theta_bar||_1 - ||theta_L||_1 ||theta_H||_1.
inline std::pair<double, double> composed_bound_excess(const Instance& inst) {
  const double bound = inst.theta_low.lpNorm<1>() * inst.theta_high.lpNorm<1>();
  const Eigen::VectorXd bar = compose_product(inst.theta_low, inst.theta_high);
  const double op = oracle::spectral_norm(oracle::dense_cheb_poly(bar, inst.lap)) - bound;
  return {op, bar.lpNorm<1>() - bound};
}

/// ||P f x|| - max_{i in Omega} |f_L f_H|(lambda_i) ||P x|| for a random band Omega.
inline double bandwise_excess(const Instance& inst, std::mt19937_64& rng) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inst.lap);
  const Index n = inst.lap.rows();
  std::bernoulli_distribution pick(0.5);
  std::vector<Index> omega;
  for (Index i = 0; i < n; ++i)
    if (pick(rng)) omega.push_back(i);
  if (omega.empty()) omega.push_back(n - 1);

  Eigen::MatrixXd u_omega(n, static_cast<Index>(omega.size()));
  double gain = 0.0;
  for (std::size_t c = 0; c < omega.size(); ++c) {
    u_omega.col(static_cast<Index>(c)) = es.eigenvectors().col(omega[c]);
    const double lambda = es.eigenvalues()[omega[c]];
    gain = std::max(gain, std::abs(oracle::cheb_scalar(inst.theta_low, lambda) *
                                   oracle::cheb_scalar(inst.theta_high, lambda)));
  }
  const Eigen::MatrixXd proj = u_omega * u_omega.transpose();
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n; ++i) x[i] = normal(rng);
  const Eigen::MatrixXd f =
      oracle::dense_cheb_poly(inst.theta_low, inst.lap) * oracle::dense_cheb_poly(inst.theta_high, inst.lap);
  return (proj * f * x).norm() - gain * (proj * x).norm();
}

/// Random score pair; returns (||dY||_F / ||dS||_F, ||Y||_F - sqrt(N)).
inline std::pair<double, double> softmax_ratio(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> rows(1, 20), cols(2, 8);
  std::uniform_real_distribution<double> scale(0.01, 10.0);
  const Index n = rows(rng), c = cols(rng);
  std::normal_distribution<double> normal;
  Matrix s(n, c), t(n, c);
  const double sa = scale(rng), sb = scale(rng);
  std::bernoulli_distribution small_step(0.3);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < c; ++j) {
      s(i, j) = sa * normal(rng);
      t(i, j) = s(i, j) + sb * normal(rng) * (small_step(rng) ? 1e-3 : 1.0);
    }
  const Matrix ys = row_softmax(s), yt = row_softmax(t);
  return {(ys - yt).norm() / (s - t).norm(), ys.norm() - std::sqrt(static_cast<double>(n))};
}

}  // namespace haam::props
