#pragma once

// Dense reference computations used as independent oracles in tests. Nothing
// here calls into the CSR kernels or the panel recurrence of the library.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "haam/graph.hpp"

namespace haam::oracle {

inline DimensionGraph random_graph(Index n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (coin(rng)) edges.push_back({i, j});
  return symmetrize(n, edges);
}

inline Eigen::MatrixXd dense_adjacency(const DimensionGraph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.n_nodes(), g.n_nodes());
  for (const Edge& e : g.undirected_edges()) a(e.u, e.v) = a(e.v, e.u) = 1.0;
  return a;
}

/// I - D^{-1/2} (A + I) D^{-1/2} with D the degrees of A + I.
inline Eigen::MatrixXd dense_laplacian(const Eigen::MatrixXd& a) {
  const Index n = a.rows();
  Eigen::MatrixXd a_hat = a + Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd d = a_hat.rowwise().sum().cwiseSqrt().cwiseInverse();
  return Eigen::MatrixXd::Identity(n, n) - d.asDiagonal() * a_hat * d.asDiagonal();
}

inline Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

/// Random symmetric matrix with spectrum inside [-1, 1].
inline Eigen::MatrixXd random_symmetric_unit_spectrum(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd g(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::VectorXd lambda(n);
  for (Index i = 0; i < n; ++i) lambda[i] = unif(rng);
  return q * lambda.asDiagonal() * q.transpose();
}

/// T_k(M) for k = 0..degree by the dense matrix recurrence.
inline std::vector<Eigen::MatrixXd> dense_cheb_basis(const Eigen::MatrixXd& m, int degree) {
  const Index n = m.rows();
  std::vector<Eigen::MatrixXd> t;
  t.push_back(Eigen::MatrixXd::Identity(n, n));
  if (degree >= 1) t.push_back(m);
  for (int k = 2; k <= degree; ++k) t.push_back(2.0 * m * t[k - 1] - t[k - 2]);
  return t;
}

inline Eigen::MatrixXd dense_cheb_poly(const Eigen::VectorXd& c, const Eigen::MatrixXd& m) {
  const auto basis = dense_cheb_basis(m, static_cast<int>(c.size()) - 1);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  for (Index k = 0; k < c.size(); ++k) out += c[k] * basis[static_cast<std::size_t>(k)];
  return out;
}

/// Scalar T_k(x) via cos(k acos x) on [-1, 1].
inline double cheb_t(int k, double x) { return std::cos(k * std::acos(std::clamp(x, -1.0, 1.0))); }

inline double cheb_scalar(const Eigen::VectorXd& c, double x) {
  double s = 0.0;
  for (Index k = 0; k < c.size(); ++k) s += c[k] * cheb_t(static_cast<int>(k), x);
  return s;
}

/// Monomial coefficients of T_k, k = 0..n-1 (row k holds T_k).
inline Eigen::MatrixXd cheb_to_monomial_table(int n) {
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  t(0, 0) = 1.0;
  if (n > 1) t(1, 1) = 1.0;
  for (int k = 2; k < n; ++k) {
    for (int p = 0; p < n; ++p) {
      if (p > 0) t(k, p) += 2.0 * t(k - 1, p - 1);
      t(k, p) -= t(k - 2, p);
    }
  }
  return t;
}

/// Multiplies two Chebyshev series by converting to the monomial basis,
/// convolving, and solving back.
inline Eigen::VectorXd cheb_product_via_monomials(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(a.size() + b.size() - 1);
  const Eigen::MatrixXd table = cheb_to_monomial_table(n);
  Eigen::VectorXd pa = Eigen::VectorXd::Zero(n), pb = Eigen::VectorXd::Zero(n), prod = Eigen::VectorXd::Zero(n);
  for (Index k = 0; k < a.size(); ++k) pa += a[k] * table.row(k).transpose();
  for (Index k = 0; k < b.size(); ++k) pb += b[k] * table.row(k).transpose();
  for (int i = 0; i < n; ++i)
    for (int j = 0; i + j < n; ++j) prod[i + j] += pa[i] * pb[j];
  // prod = table^T * c  ->  solve for c.
  return table.transpose().fullPivLu().solve(prod);
}

}  // namespace haam::oracle
