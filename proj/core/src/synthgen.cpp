#include "haam/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "haam/error.hpp"

namespace haam {
namespace {

constexpr std::uint64_t kLabelStream = 1;
constexpr std::uint64_t kFeatureStream = 2;
constexpr std::uint64_t kSplitStream = 3;
constexpr std::uint64_t kDimensionStreamBase = 100;

// Draws the gap to the next success of a Bernoulli(p) sequence.
Index geometric_skip(double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  return static_cast<Index>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

}  // namespace

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

void SynthConfig::validate() const {
  if (n_classes < 2) throw InvalidInput("synth config: need at least 2 classes");
  if (n_nodes < 3 * n_classes) throw InvalidInput("synth config: need at least 3 nodes per class");
  if (n_dims < 1) throw InvalidInput("synth config: need at least one dimension");
  if (static_cast<int>(rho.size()) != n_dims) {
    throw InvalidInput("synth config: rho has " + std::to_string(rho.size()) + " entries, expected " +
                       std::to_string(n_dims));
  }
  for (double r : rho) {
    if (!(r > 0.0 && r < 1.0)) throw InvalidInput("synth config: rho entries must lie in (0, 1)");
  }
  if (!(mean_degree > 0.0)) throw InvalidInput("synth config: mean degree must be positive");
  if (feature_dim < 1) throw InvalidInput("synth config: feature_dim must be >= 1");
  if (!(feature_separation >= 0.0)) throw InvalidInput("synth config: feature separation must be nonnegative");
  split.validate();
}

ClassMixMatrix build_mix_matrix(double rho, int n_classes) {
  if (n_classes < 2) throw InvalidInput("build_mix_matrix: need at least 2 classes");
  if (!(rho >= 0.0 && rho <= 1.0)) throw InvalidInput("build_mix_matrix: rho must lie in [0, 1]");
  ClassMixMatrix m;
  m.b = Eigen::MatrixXd::Constant(n_classes, n_classes, (1.0 - rho) / (n_classes - 1));
  m.b.diagonal().setConstant(rho);
  return m;
}

std::vector<int> balanced_labels(Index n_nodes, int n_classes, std::mt19937_64& rng) {
  std::vector<int> labels(static_cast<std::size_t>(n_nodes));
  for (Index i = 0; i < n_nodes; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % n_classes);
  std::shuffle(labels.begin(), labels.end(), rng);
  return labels;
}

DimensionGraph sample_graph(const SynthConfig& cfg, std::span<const int> labels, const ClassMixMatrix& mix,
                            std::mt19937_64& rng, int dimension_id) {
  const int c_count = static_cast<int>(mix.b.rows());
  const auto n = static_cast<Index>(labels.size());
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(c_count));
  for (Index i = 0; i < n; ++i) members[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);

  auto size_of = [&](int c) { return static_cast<double>(members[static_cast<std::size_t>(c)].size()); };
  double weight = 0.0;
  for (int a = 0; a < c_count; ++a) {
    weight += mix.b(a, a) * size_of(a) * (size_of(a) - 1.0) / 2.0;
    for (int b = a + 1; b < c_count; ++b) weight += mix.b(a, b) * size_of(a) * size_of(b);
  }
  const double scale = weight > 0.0 ? (static_cast<double>(n) * cfg.mean_degree / 2.0) / weight : 0.0;

  std::vector<Edge> edges;
  for (int a = 0; a < c_count; ++a) {
    const auto& ma = members[static_cast<std::size_t>(a)];
    // Within class a: pairs (ma[x], ma[y]) with x < y, walked row by row.
    {
      const double p = std::min(1.0, scale * mix.b(a, a));
      const auto m = static_cast<Index>(ma.size());
      if (p > 0.0 && m > 1) {
        Index x = 0;
        Index pos = p < 1.0 ? geometric_skip(p, rng) : 0;
        while (x < m - 1) {
          const Index row_len = m - 1 - x;
          if (pos >= row_len) {
            pos -= row_len;
            ++x;
            continue;
          }
          edges.push_back({ma[static_cast<std::size_t>(x)], ma[static_cast<std::size_t>(x + 1 + pos)]});
          pos += 1 + (p < 1.0 ? geometric_skip(p, rng) : 0);
        }
      }
    }
    for (int b = a + 1; b < c_count; ++b) {
      const auto& mb = members[static_cast<std::size_t>(b)];
      const double p = std::min(1.0, scale * mix.b(a, b));
      const auto total = static_cast<Index>(ma.size() * mb.size());
      if (p <= 0.0 || total == 0) continue;
      const auto cols = static_cast<Index>(mb.size());
      for (Index k = p < 1.0 ? geometric_skip(p, rng) : 0; k < total; k += 1 + (p < 1.0 ? geometric_skip(p, rng) : 0)) {
        edges.push_back({ma[static_cast<std::size_t>(k / cols)], mb[static_cast<std::size_t>(k % cols)]});
      }
    }
  }
  return symmetrize(n, edges, dimension_id);
}

Matrix sample_features(const SynthConfig& cfg, std::span<const int> labels, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix means = Matrix::Zero(cfg.n_classes, cfg.feature_dim);
  if (cfg.feature_separation > 0.0) {
    for (int c = 0; c < cfg.n_classes; ++c) {
      for (Index f = 0; f < cfg.feature_dim; ++f) means(c, f) = normal(rng);
      const double norm = means.row(c).norm();
      if (norm > 0.0) means.row(c) *= cfg.feature_separation / norm;
    }
  }
  Matrix x(static_cast<Index>(labels.size()), cfg.feature_dim);
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index f = 0; f < x.cols(); ++f) x(i, f) = means(labels[static_cast<std::size_t>(i)], f) + normal(rng);
  }
  return x;
}

DatasetBundle generate(const SynthConfig& cfg) {
  cfg.validate();
  DatasetBundle out;
  out.n_classes = cfg.n_classes;

  auto label_rng = derived_rng(cfg.seed, kLabelStream);
  out.labels = balanced_labels(cfg.n_nodes, cfg.n_classes, label_rng);

  std::vector<DimensionGraph> dims;
  for (int d = 0; d < cfg.n_dims; ++d) {
    auto rng = derived_rng(cfg.seed, kDimensionStreamBase + static_cast<std::uint64_t>(d));
    dims.push_back(sample_graph(cfg, out.labels, build_mix_matrix(cfg.rho[static_cast<std::size_t>(d)], cfg.n_classes),
                                rng, d));
    out.dimension_names.push_back("dim" + std::to_string(d));
    out.homophily.push_back(homophily_ratio(dims.back(), out.labels));
  }
  out.graph = MultiplexGraph(std::move(dims));

  auto feature_rng = derived_rng(cfg.seed, kFeatureStream);
  out.features = sample_features(cfg, out.labels, feature_rng);

  SplitSpec split = cfg.split;
  split.seed = derived_rng(cfg.seed ^ cfg.split.seed, kSplitStream)();
  out.splits = make_splits(out.labels, cfg.n_classes, split);
  return out;
}

}  // namespace haam
