#include "haam/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "haam/error.hpp"
#include "haam/parallel.hpp"

namespace haam {
namespace {

constexpr double kLambdaFloor = 1e-3;
constexpr double kLambdaInflation = 1e-6;
constexpr double kLanczosTolerance = 1e-10;
constexpr int kMaxKrylovSteps = 500;

// Deterministic start vector with no special alignment to graph structure.
Vector krylov_start(Index n) {
  Vector v(n);
  std::uint64_t state = 0x9E3779B97F4A7C15ull;
  for (Index i = 0; i < n; ++i) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    v[i] = 0.5 + static_cast<double>(z >> 11) * 0x1.0p-53;
  }
  return v;
}

}  // namespace

DimensionGraph DimensionGraph::from_csr(Index n_nodes, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                                        int dimension_id) {
  if (n_nodes < 0) throw InvalidInput("graph: negative node count");
  if (static_cast<Index>(row_ptr.size()) != n_nodes + 1 || row_ptr.front() != 0 ||
      row_ptr.back() != static_cast<Index>(col_idx.size())) {
    throw InvalidInput("graph: row pointer array inconsistent with node/entry count");
  }
  for (Index i = 0; i < n_nodes; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw InvalidInput("graph: row pointers not monotone");
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const Index j = col_idx[p];
      if (j < 0 || j >= n_nodes) throw InvalidInput("graph: column index out of range");
      if (j == i) throw InvalidInput("graph: self-loop at node " + std::to_string(i));
      if (p > row_ptr[i] && col_idx[p - 1] >= j) {
        throw InvalidInput("graph: row " + std::to_string(i) + " not strictly increasing");
      }
    }
  }
  for (Index i = 0; i < n_nodes; ++i) {
    for (Index p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
      const Index j = col_idx[p];
      auto first = col_idx.begin() + row_ptr[j];
      auto last = col_idx.begin() + row_ptr[j + 1];
      if (!std::binary_search(first, last, i)) {
        throw InvalidInput("graph: adjacency not symmetric at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
    }
  }

  DimensionGraph g;
  g.n_nodes_ = n_nodes;
  g.row_ptr_ = std::move(row_ptr);
  g.col_idx_ = std::move(col_idx);
  g.dimension_id_ = dimension_id;
  return g;
}

std::vector<Edge> DimensionGraph::undirected_edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(n_edges()));
  for (Index i = 0; i < n_nodes_; ++i) {
    for (Index j : neighbors(i)) {
      if (i < j) out.push_back({i, j});
    }
  }
  return out;
}

DimensionGraph symmetrize(Index n_nodes, std::span<const Edge> edges, int dimension_id) {
  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= n_nodes || e.v >= n_nodes) {
      throw InvalidInput("symmetrize: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                         ") out of range for " + std::to_string(n_nodes) + " nodes");
    }
    if (e.u == e.v) continue;
    directed.push_back({e.u, e.v});
    directed.push_back({e.v, e.u});
  }
  std::sort(directed.begin(), directed.end(),
            [](const Edge& a, const Edge& b) { return a.u != b.u ? a.u < b.u : a.v < b.v; });
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  std::vector<Index> row_ptr(static_cast<std::size_t>(n_nodes) + 1, 0);
  std::vector<Index> col_idx;
  col_idx.reserve(directed.size());
  for (const Edge& e : directed) {
    ++row_ptr[e.u + 1];
    col_idx.push_back(e.v);
  }
  for (Index i = 0; i < n_nodes; ++i) row_ptr[i + 1] += row_ptr[i];
  return DimensionGraph::from_csr(n_nodes, std::move(row_ptr), std::move(col_idx), dimension_id);
}

MultiplexGraph::MultiplexGraph(std::vector<DimensionGraph> dimensions) : dims_(std::move(dimensions)) {
  if (dims_.empty()) throw InvalidInput("multiplex graph needs at least one dimension");
  n_nodes_ = dims_.front().n_nodes();
  for (std::size_t d = 0; d < dims_.size(); ++d) {
    if (dims_[d].n_nodes() != n_nodes_) {
      throw InvalidInput("multiplex graph: dimension " + std::to_string(d) + " has " +
                         std::to_string(dims_[d].n_nodes()) + " nodes, expected " + std::to_string(n_nodes_));
    }
    dims_[d].set_dimension_id(static_cast<int>(d));
  }
}

CsrMatrix normalized_laplacian(const DimensionGraph& g) {
  const Index n = g.n_nodes();
  Vector inv_sqrt_deg(n);
  for (Index i = 0; i < n; ++i) inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(g.degree(i) + 1));

  CsrMatrix l;
  l.rows = l.cols = n;
  l.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  l.col_idx.reserve(static_cast<std::size_t>(g.n_entries() + n));
  l.values.reserve(static_cast<std::size_t>(g.n_entries() + n));
  for (Index i = 0; i < n; ++i) {
    bool diagonal_done = false;
    auto emit_diagonal = [&] {
      l.col_idx.push_back(i);
      l.values.push_back(1.0 - inv_sqrt_deg[i] * inv_sqrt_deg[i]);
      diagonal_done = true;
    };
    for (Index j : g.neighbors(i)) {
      if (!diagonal_done && j > i) emit_diagonal();
      l.col_idx.push_back(j);
      // Product of the two factors in a fixed order keeps (i,j) and (j,i) bitwise equal.
      l.values.push_back(-(std::min(inv_sqrt_deg[i], inv_sqrt_deg[j]) * std::max(inv_sqrt_deg[i], inv_sqrt_deg[j])));
    }
    if (!diagonal_done) emit_diagonal();
    l.row_ptr[i + 1] = static_cast<Index>(l.col_idx.size());
  }
  return l;
}

double estimate_lambda_max(const CsrMatrix& l) {
  for (double v : l.values) {
    if (!std::isfinite(v)) throw NumericError("estimate_lambda_max: operator has non-finite entries");
  }
  const Index n = l.rows;
  if (n == 0) return kLambdaFloor;

  // Lanczos with full reorthogonalization; the top Ritz value approaches the
  // largest eigenvalue from below.
  const Index max_steps = std::min<Index>(n, kMaxKrylovSteps);
  Eigen::MatrixXd basis(n, max_steps);
  Vector alpha(max_steps), beta(max_steps);
  Matrix q = krylov_start(n);
  q /= q.norm();
  Matrix w;
  double estimate = 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
  for (Index k = 0; k < max_steps; ++k) {
    basis.col(k) = q.col(0);
    l.multiply(q, w);
    Vector r = w.col(0);
    alpha[k] = basis.col(k).dot(r);
    for (int pass = 0; pass < 2; ++pass) {
      r -= basis.leftCols(k + 1) * (basis.leftCols(k + 1).transpose() * r);
    }
    beta[k] = r.norm();

    const Vector diag = alpha.head(k + 1);
    const Vector sub = beta.head(k);
    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    estimate = tri.eigenvalues()[k];
    const double residual = beta[k] * std::abs(tri.eigenvectors()(k, k));
    const double scale = std::max(std::abs(estimate), 1e-300);
    if (residual <= kLanczosTolerance * scale || beta[k] <= 1e-14 * std::max(1.0, std::abs(alpha[k]))) break;
    q.col(0) = r / beta[k];
  }
  return std::max(estimate * (1.0 + kLambdaInflation), kLambdaFloor);
}

RescaledLaplacian build_rescaled_laplacian(const DimensionGraph& g) {
  if (g.n_nodes() == 0) throw InvalidInput("build_rescaled_laplacian: graph has no nodes");
  RescaledLaplacian out;
  out.matrix = normalized_laplacian(g);
  out.lambda_max = estimate_lambda_max(out.matrix);
  out.dimension_id = g.dimension_id();
  const double scale = 2.0 / out.lambda_max;
  for (Index i = 0; i < out.matrix.rows; ++i) {
    for (Index p = out.matrix.row_ptr[i]; p < out.matrix.row_ptr[i + 1]; ++p) {
      out.matrix.values[p] *= scale;
      if (out.matrix.col_idx[p] == i) out.matrix.values[p] -= 1.0;
    }
  }
  return out;
}

std::vector<RescaledLaplacian> build_rescaled_laplacians(const MultiplexGraph& g, int threads) {
  std::vector<RescaledLaplacian> out(static_cast<std::size_t>(g.n_dims()));
  parallel_for(g.n_dims(), threads, [&](int d) { out[static_cast<std::size_t>(d)] = build_rescaled_laplacian(g[d]); });
  return out;
}

ClassConnectivity class_connectivity(const DimensionGraph& g, std::span<const int> labels, int n_classes) {
  if (static_cast<Index>(labels.size()) != g.n_nodes()) {
    throw InvalidInput("class_connectivity: label count does not match node count");
  }
  ClassConnectivity c;
  c.counts.setZero(n_classes, n_classes);
  for (Index i = 0; i < g.n_nodes(); ++i) {
    const int ci = labels[static_cast<std::size_t>(i)];
    if (ci < 0 || ci >= n_classes) throw InvalidInput("class_connectivity: label out of range");
    for (Index j : g.neighbors(i)) ++c.counts(ci, labels[static_cast<std::size_t>(j)]);
  }
  return c;
}

double homophily_ratio(const ClassConnectivity& c) {
  const auto total = c.counts.sum();
  if (total == 0) return 1.0;
  return static_cast<double>(c.counts.trace()) / static_cast<double>(total);
}

double homophily_ratio(const DimensionGraph& g, std::span<const int> labels) {
  if (static_cast<Index>(labels.size()) != g.n_nodes()) {
    throw InvalidInput("homophily_ratio: label count does not match node count");
  }
  if (g.n_entries() == 0) return 1.0;
  Index same = 0;
  for (Index i = 0; i < g.n_nodes(); ++i) {
    for (Index j : g.neighbors(i)) {
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) ++same;
    }
  }
  return static_cast<double>(same) / static_cast<double>(g.n_entries());
}

}  // namespace haam
