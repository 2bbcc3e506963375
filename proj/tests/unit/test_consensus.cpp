#include <doctest.h>

#include <limits>
#include <random>

#include "haam/consensus.hpp"
#include "haam/error.hpp"
#include "haam/model.hpp"

using namespace haam;

namespace {

std::vector<Matrix> random_predictions(int n_dims, Index n, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 2.0);
  std::vector<Matrix> out;
  for (int d = 0; d < n_dims; ++d) {
    Matrix s(n, c);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < c; ++j) s(i, j) = normal(rng);
    out.push_back(row_softmax(s));
  }
  return out;
}

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

}  // namespace

TEST_CASE("soft_threshold") {
  Matrix v(1, 3);
  v << 2.5, -0.3, -4.0;
  const Matrix out = soft_threshold(v, 1.0);
  CHECK(out(0, 0) == 1.5);
  CHECK(out(0, 1) == 0.0);
  CHECK(out(0, 2) == -3.0);
  CHECK(soft_threshold(v, 0.0) == v);
  CHECK(soft_threshold(v, 4.0).isZero());
  CHECK_THROWS_AS(soft_threshold(v, -1.0), InvalidInput);
}

TEST_CASE("step size is 1/(4D)") {
  CHECK(consensus_step_size(1) == 0.25);
  CHECK(consensus_step_size(3) == 1.0 / 12.0);
  CHECK_THROWS_AS(consensus_step_size(0), InvalidInput);
}

TEST_CASE("unregularized consensus is the mean") {
  std::mt19937_64 rng(1);
  const auto one = random_predictions(1, 10, 3, rng);
  ConsensusConfig cfg;
  cfg.beta = 0.0;
  CHECK((proximal_consensus(one, cfg).y_hat - one[0]).cwiseAbs().maxCoeff() < 1e-8);

  const auto two = random_predictions(2, 10, 3, rng);
  CHECK((proximal_consensus(two, cfg).y_hat - 0.5 * (two[0] + two[1])).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("scalar fixed point with l1 penalty") {
  // 4y - 2.4 + beta sign(y) = 0 with beta = 1 gives y = 0.35.
  const std::vector<Matrix> y{scalar(0.8), scalar(0.4)};
  ConsensusConfig cfg;
  cfg.beta = 1.0;
  const auto r = proximal_consensus(y, cfg);
  CHECK(std::abs(r.y_hat(0, 0) - 0.35) < 1e-8);
  CHECK(r.nnz == 1);
}

TEST_CASE("objective is nonincreasing and sparsity is monotone in beta") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto y = random_predictions(3, 40, 4, rng);
    Index previous_nnz = std::numeric_limits<Index>::max();
    for (double beta : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      ConsensusConfig cfg;
      cfg.beta = beta;
      const auto r = proximal_consensus(y, cfg);
      for (std::size_t i = 1; i < r.objective_trace.size(); ++i)
        CHECK(r.objective_trace[i] <= r.objective_trace[i - 1] + 1e-9);
      CHECK(r.nnz <= previous_nnz);
      previous_nnz = r.nnz;

      Matrix mean = (y[0] + y[1] + y[2]) / 3.0;
      CHECK(r.y_hat.minCoeff() >= -mean.maxCoeff() - 1e-12);
      CHECK(r.y_hat.maxCoeff() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("consensus rejects empty or ragged input") {
  ConsensusConfig cfg;
  CHECK_THROWS_AS(proximal_consensus(std::vector<Matrix>{}, cfg), InvalidInput);
  CHECK_THROWS_AS(proximal_consensus(std::vector<Matrix>{Matrix::Zero(2, 2), Matrix::Zero(3, 2)}, cfg), InvalidInput);
  cfg.iterations = 0;
  CHECK_THROWS_AS(proximal_consensus(std::vector<Matrix>{Matrix::Zero(2, 2)}, cfg), InvalidInput);
}

TEST_CASE("predict_labels") {
  ConsensusResult r;
  r.y_hat.resize(3, 3);
  r.y_hat << 0.9, 0.1, 0.0,  //
      0.0, 0.0, 0.0,          //
      0.5, 0.5, 0.0;
  Matrix mean(3, 3);
  mean << 0.3, 0.3, 0.4,  //
      0.2, 0.5, 0.3,      //
      0.1, 0.1, 0.8;
  const auto labels = predict_labels(r, std::vector<Matrix>{mean});
  CHECK(labels == std::vector<int>{0, 1, 0});
}
