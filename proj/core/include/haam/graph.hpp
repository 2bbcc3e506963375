#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "haam/csr.hpp"
#include "haam/types.hpp"

namespace haam {

struct Edge {
  Index u = 0;
  Index v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// One dimension of a multiplex graph: an undirected, unweighted, simple
/// adjacency structure in CSR form. Both (i,j) and (j,i) are stored; column
/// indices are strictly increasing within a row; there are no self-loops.
class DimensionGraph {
 public:
  DimensionGraph() = default;

  /// Validates symmetry, ordering and range. Throws InvalidInput on violation.
  static DimensionGraph from_csr(Index n_nodes, std::vector<Index> row_ptr, std::vector<Index> col_idx,
                                 int dimension_id = 0);

  Index n_nodes() const { return n_nodes_; }
  /// Number of ordered adjacency entries, i.e. sum_ij A_ij.
  Index n_entries() const { return static_cast<Index>(col_idx_.size()); }
  Index n_edges() const { return n_entries() / 2; }
  Index degree(Index i) const { return row_ptr_[i + 1] - row_ptr_[i]; }
  int dimension_id() const { return dimension_id_; }
  void set_dimension_id(int d) { dimension_id_ = d; }

  std::span<const Index> neighbors(Index i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(degree(i))};
  }
  const std::vector<Index>& row_ptr() const { return row_ptr_; }
  const std::vector<Index>& col_idx() const { return col_idx_; }

  /// Each undirected edge once, with u < v, in row-major order.
  std::vector<Edge> undirected_edges() const;

  friend bool operator==(const DimensionGraph&, const DimensionGraph&) = default;

 private:
  Index n_nodes_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  int dimension_id_ = 0;
};

/// Undirected closure of an edge list. Duplicates and self-loops are dropped.
DimensionGraph symmetrize(Index n_nodes, std::span<const Edge> edges, int dimension_id = 0);

/// D dimensions over a shared node set.
class MultiplexGraph {
 public:
  MultiplexGraph() = default;
  explicit MultiplexGraph(std::vector<DimensionGraph> dimensions);

  Index n_nodes() const { return n_nodes_; }
  int n_dims() const { return static_cast<int>(dims_.size()); }
  const DimensionGraph& operator[](int d) const { return dims_[static_cast<std::size_t>(d)]; }
  const std::vector<DimensionGraph>& dimensions() const { return dims_; }

  friend bool operator==(const MultiplexGraph&, const MultiplexGraph&) = default;

 private:
  std::vector<DimensionGraph> dims_;
  Index n_nodes_ = 0;
};

/// 2 L / lambda_max - I for one dimension, with L the self-loop renormalized
/// Laplacian  I - D^{-1/2} (A + I) D^{-1/2},  D = diag(rowsum(A + I)).
struct RescaledLaplacian {
  CsrMatrix matrix;
  double lambda_max = 1.0;
  int dimension_id = 0;

  Index n_nodes() const { return matrix.rows; }
};

/// L = I - D^{-1/2} (A + I) D^{-1/2}. Pattern equals that of A + I.
CsrMatrix normalized_laplacian(const DimensionGraph& g);

/// Krylov (Lanczos) estimate of the largest eigenvalue of a symmetric PSD
/// operator, at most 500 steps, inflated by (1 + 1e-6) and floored at 1e-3.
double estimate_lambda_max(const CsrMatrix& l);

RescaledLaplacian build_rescaled_laplacian(const DimensionGraph& g);
std::vector<RescaledLaplacian> build_rescaled_laplacians(const MultiplexGraph& g, int threads = 1);

/// C x C counts of ordered adjacency entries (i, j) by (label_i, label_j).
struct ClassConnectivity {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;
};

ClassConnectivity class_connectivity(const DimensionGraph& g, std::span<const int> labels, int n_classes);

/// Fraction of adjacency entries joining same-class nodes. Edgeless graphs
/// report 1.0.
double homophily_ratio(const DimensionGraph& g, std::span<const int> labels);
double homophily_ratio(const ClassConnectivity& c);

}  // namespace haam
