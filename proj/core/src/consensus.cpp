#include "haam/consensus.hpp"

#include <cmath>
#include <string>

#include "haam/error.hpp"

namespace haam {

void ConsensusConfig::validate() const {
  if (!(beta >= 0.0)) throw InvalidInput("consensus: beta must be nonnegative");
  if (iterations < 1) throw InvalidInput("consensus: iterations must be >= 1");
  if (!(tolerance >= 0.0)) throw InvalidInput("consensus: tolerance must be nonnegative");
}

double consensus_step_size(int n_dims) {
  if (n_dims < 1) throw InvalidInput("consensus: need at least one dimension");
  return 1.0 / (4.0 * n_dims);
}

Matrix soft_threshold(const Matrix& v, double lambda) {
  if (!(lambda >= 0.0)) throw InvalidInput("soft_threshold: lambda must be nonnegative");
  return v.unaryExpr([lambda](double x) {
    const double mag = std::abs(x) - lambda;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
  });
}

double consensus_objective(const Matrix& y, std::span<const Matrix> y_ds, double beta) {
  double obj = beta * y.lpNorm<1>();
  for (const Matrix& yd : y_ds) obj += (y - yd).squaredNorm();
  return obj;
}

ConsensusResult proximal_consensus(std::span<const Matrix> y_ds, const ConsensusConfig& cfg) {
  cfg.validate();
  const int n_dims = static_cast<int>(y_ds.size());
  const double t = consensus_step_size(n_dims);
  for (const Matrix& yd : y_ds) {
    if (yd.rows() != y_ds[0].rows() || yd.cols() != y_ds[0].cols()) {
      throw InvalidInput("proximal_consensus: prediction matrices differ in shape");
    }
  }

  Matrix sum = y_ds[0];
  for (int d = 1; d < n_dims; ++d) sum += y_ds[static_cast<std::size_t>(d)];

  ConsensusResult r;
  r.y_hat = Matrix::Zero(sum.rows(), sum.cols());
  for (int it = 0; it < cfg.iterations; ++it) {
    // sum_d (Y - Y_d) = D Y - sum_d Y_d
    Matrix next = soft_threshold(r.y_hat - 2.0 * t * (n_dims * r.y_hat - sum), cfg.beta * t);
    const double change = (next - r.y_hat).norm();
    r.y_hat = std::move(next);
    r.objective_trace.push_back(consensus_objective(r.y_hat, y_ds, cfg.beta));
    r.iterations = it + 1;
    if (change < cfg.tolerance) break;
  }
  if (!r.y_hat.allFinite()) throw NumericError("proximal_consensus: non-finite iterate");
  r.nnz = (r.y_hat.array() != 0.0).count();
  return r;
}

std::vector<int> predict_labels(const ConsensusResult& r, std::span<const Matrix> y_ds) {
  std::vector<int> out(static_cast<std::size_t>(r.y_hat.rows()));
  for (Index i = 0; i < r.y_hat.rows(); ++i) {
    Index arg = 0;
    if ((r.y_hat.row(i).array() == 0.0).all() && !y_ds.empty()) {
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(r.y_hat.cols());
      for (const Matrix& yd : y_ds) mean += yd.row(i);
      mean.maxCoeff(&arg);
    } else {
      r.y_hat.row(i).maxCoeff(&arg);
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

}  // namespace haam
