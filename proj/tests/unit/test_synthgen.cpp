#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <random>

#include "haam/error.hpp"
#include "haam/synthgen.hpp"

using namespace haam;

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

// Nearest-centroid accuracy of features alone, fit on even nodes, scored on odd ones.
double centroid_accuracy(const Matrix& x, const std::vector<int>& labels, int c) {
  Matrix centroid = Matrix::Zero(c, x.cols());
  std::vector<int> counts(c, 0);
  for (Index i = 0; i < x.rows(); i += 2) {
    centroid.row(labels[i]) += x.row(i);
    ++counts[labels[i]];
  }
  for (int k = 0; k < c; ++k) centroid.row(k) /= counts[k];
  int hits = 0, total = 0;
  for (Index i = 1; i < x.rows(); i += 2) {
    Index best = 0;
    (centroid.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
    hits += best == labels[i];
    ++total;
  }
  return static_cast<double>(hits) / total;
}

}  // namespace

TEST_CASE("mix matrix") {
  const auto m = build_mix_matrix(0.9, 4);
  CHECK(m.b(0, 0) == 0.9);
  CHECK(m.b(1, 2) == doctest::Approx(0.1 / 3.0));
  CHECK((m.b.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-15);
  const auto neutral = build_mix_matrix(0.25, 4);
  CHECK((neutral.b.array() - 0.25).abs().maxCoeff() < 1e-15);
  CHECK((build_mix_matrix(0.5, 2).b.array() == 0.5).all());
  CHECK_THROWS_AS(build_mix_matrix(0.5, 1), InvalidInput);
}

TEST_CASE("balanced labels") {
  std::mt19937_64 rng(3);
  const auto labels = balanced_labels(103, 4, rng);
  std::vector<int> counts(4, 0);
  for (int l : labels) ++counts[l];
  CHECK(*std::max_element(counts.begin(), counts.end()) - *std::min_element(counts.begin(), counts.end()) <= 1);
}

TEST_CASE("pure homophily limit") {
  SynthConfig cfg;
  cfg.n_nodes = 400;
  std::mt19937_64 rng(5);
  const auto labels = balanced_labels(cfg.n_nodes, cfg.n_classes, rng);
  const auto g = sample_graph(cfg, labels, build_mix_matrix(1.0, cfg.n_classes), rng);
  CHECK(g.n_entries() > 0);
  CHECK(homophily_ratio(g, labels) == 1.0);
}

TEST_CASE("realized homophily and degree track the targets") {
  SynthConfig cfg;
  cfg.n_nodes = 2000;
  cfg.n_dims = 1;
  for (double rho : {0.1, 0.5, 0.9}) {
    cfg.rho = {rho};
    std::vector<double> h, deg;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      cfg.seed = seed;
      const auto data = generate(cfg);
      h.push_back(data.homophily[0]);
      deg.push_back(static_cast<double>(data.graph[0].n_entries()) / cfg.n_nodes);
    }
    INFO("rho = " << rho);
    CHECK(std::abs(median(h) - rho) <= 0.02);
    CHECK(median(deg) >= 11.0);
    CHECK(median(deg) <= 13.0);
  }
}

TEST_CASE("desk-scale generation is fast, simple and deterministic") {
  SynthConfig cfg;
  cfg.seed = 11;
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = generate(cfg);
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::seconds(5));
  const auto b = generate(cfg);
  CHECK(a.features == b.features);
  CHECK(a.labels == b.labels);
  CHECK(a.graph == b.graph);
  CHECK(a.splits == b.splits);

  for (int d = 0; d < a.n_dims(); ++d) {
    for (Index i = 0; i < a.n_nodes(); ++i) {
      const auto nb = a.graph[d].neighbors(i);
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      CHECK(std::find(nb.begin(), nb.end(), i) == nb.end());
    }
    CHECK(std::abs(a.homophily[d] - 0.9) <= 0.05);
  }
  CHECK(a.splits.train.size() == 60);
  CHECK(a.splits.val.size() == 60);
  CHECK(a.splits.test.size() == 480);
}

TEST_CASE("feature separation controls class signal") {
  SynthConfig cfg;
  cfg.n_nodes = 2000;
  cfg.n_dims = 1;
  cfg.rho = {0.5};
  cfg.feature_separation = 6.0;
  std::mt19937_64 rng(1);
  const auto labels = balanced_labels(cfg.n_nodes, cfg.n_classes, rng);
  CHECK(centroid_accuracy(sample_features(cfg, labels, rng), labels, 4) >= 0.95);

  cfg.feature_separation = 0.0;
  const double chance = centroid_accuracy(sample_features(cfg, labels, rng), labels, 4);
  CHECK(chance < 0.35);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.rho = {0.9, 1.0, 0.9};
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg.rho = {0.9, 0.9};
  CHECK_THROWS_AS(cfg.validate(), InvalidInput);
  cfg.rho = {0.1, 0.3, 0.6};
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("large multi-dimension configuration generates") {
  SynthConfig cfg;
  cfg.n_nodes = 9600;
  cfg.n_classes = 6;
  cfg.n_dims = 3;
  cfg.rho = {0.1, 0.5, 0.9};
  const auto data = generate(cfg);
  CHECK(data.n_nodes() == 9600);
  for (int d = 0; d < 3; ++d) CHECK(std::abs(data.homophily[d] - cfg.rho[d]) <= 0.02);
}
