// Kernel costs: the filter recurrence should scale like 2K sparse panel
// products, i.e. O(K * nnz * C), never like a dense N x N operator.

#include <benchmark/benchmark.h>

#include <random>

#include "haam/haam.hpp"

using namespace haam;

namespace {

DatasetBundle desk_data(Index n, int dims = 3) {
  SynthConfig cfg;
  cfg.n_nodes = n;
  cfg.n_dims = dims;
  cfg.rho.assign(static_cast<std::size_t>(dims), 0.7);
  cfg.seed = 1;
  return generate(cfg);
}

Matrix random_panel(Index n, Index c) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Matrix m(n, c);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < c; ++j) m(i, j) = normal(rng);
  return m;
}

void BM_SpMM(benchmark::State& state) {
  const auto data = desk_data(state.range(0), 1);
  const auto lap = build_rescaled_laplacian(data.graph[0]);
  const Matrix x = random_panel(data.n_nodes(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(lap.matrix * x);
  state.counters["nnz"] = static_cast<double>(lap.matrix.values.size());
}
BENCHMARK(BM_SpMM)->RangeMultiplier(4)->Range(512, 32768);

void BM_ApplyComposedFilter(benchmark::State& state) {
  const int k = static_cast<int>(state.range(1));
  const auto data = desk_data(state.range(0), 1);
  const auto lap = build_rescaled_laplacian(data.graph[0]);
  GammaParams g;
  g.gamma = Vector::Constant(k, 1.0 / (k + 1));
  const FilterCoeffs fc = filter_coeffs(g);
  const Matrix x = random_panel(data.n_nodes(), 4);
  for (auto _ : state) benchmark::DoNotOptimize(apply_cheb(fc.theta_bar, lap, x));
  state.counters["nnz"] = static_cast<double>(lap.matrix.values.size());
}
BENCHMARK(BM_ApplyComposedFilter)->ArgsProduct({{512, 2048, 8192, 32768}, {2, 5}});

void BM_LambdaMax(benchmark::State& state) {
  const auto data = desk_data(state.range(0), 1);
  for (auto _ : state) benchmark::DoNotOptimize(build_rescaled_laplacian(data.graph[0]));
}
BENCHMARK(BM_LambdaMax)->RangeMultiplier(4)->Range(512, 8192);

void BM_Consensus(benchmark::State& state) {
  const Index n = state.range(0);
  std::vector<Matrix> y;
  for (int d = 0; d < 3; ++d) y.push_back(row_softmax(random_panel(n, 4) * (1.0 + d)));
  const ConsensusConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(proximal_consensus(y, cfg));
}
BENCHMARK(BM_Consensus)->RangeMultiplier(4)->Range(512, 32768);

void BM_TrainEpoch(benchmark::State& state) {
  const auto data = desk_data(state.range(0));
  const auto laps = build_rescaled_laplacians(data.graph);
  TrainConfig cfg;
  cfg.threads = static_cast<int>(state.range(1));
  ModelParams params = init_model(data, cfg);
  AdamOptimizer adam(cfg.learning_rate);
  for (auto _ : state) {
    const auto fwd = forward(params, laps, data.features, cfg.threads);
    const auto grads = backward(params, laps, fwd, data.labels, data.splits.train, cfg.alpha, cfg.threads);
    adam.step(params, grads);
  }
}
BENCHMARK(BM_TrainEpoch)->ArgsProduct({{600, 4800}, {1, 3}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
