#pragma once

#include <span>
#include <vector>

#include "haam/types.hpp"

namespace haam {

struct ConsensusConfig {
  double beta = 1.0;        // l1 weight
  int iterations = 200;     // T2
  double tolerance = 1e-10; // stop when successive iterates differ by less (Frobenius)

  void validate() const;
};

/// Step size of the proximal iteration for D dimensions: 1 / (4 D).
double consensus_step_size(int n_dims);

struct ConsensusResult {
  Matrix y_hat;
  std::vector<double> objective_trace;  // objective after each iteration
  Index nnz = 0;
  int iterations = 0;
};

/// sign(v) * max(|v| - lambda, 0), entrywise.
Matrix soft_threshold(const Matrix& v, double lambda);

/// sum_d ||Y - Y_d||_F^2 + beta * ||Y||_1
double consensus_objective(const Matrix& y, std::span<const Matrix> y_ds, double beta);

/// ISTA from Y = 0:  Y <- prox_{beta t}(Y - 2 t sum_d (Y - Y_d)),  t = 1/(4D).
ConsensusResult proximal_consensus(std::span<const Matrix> y_ds, const ConsensusConfig& cfg);

/// Row argmax of the consensus (lowest index on ties). All-zero rows fall back
/// to the argmax of the mean of the per-dimension predictions.
std::vector<int> predict_labels(const ConsensusResult& r, std::span<const Matrix> y_ds);

}  // namespace haam
