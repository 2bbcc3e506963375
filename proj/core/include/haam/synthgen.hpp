#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "haam/dataio.hpp"
#include "haam/dataset.hpp"
#include "haam/graph.hpp"

namespace haam {

struct SynthConfig {
  Index n_nodes = 600;
  int n_classes = 4;
  int n_dims = 3;
  std::vector<double> rho{0.9, 0.9, 0.9};  // target homophily per dimension, in (0, 1)
  double mean_degree = 12.0;
  Index feature_dim = 32;
  double feature_separation = 3.0;
  std::uint64_t seed = 0;
  SplitSpec split;

  void validate() const;
};

/// C x C class mixing weights: rho on the diagonal, (1 - rho) / (C - 1) elsewhere.
struct ClassMixMatrix {
  Eigen::MatrixXd b;
};

ClassMixMatrix build_mix_matrix(double rho, int n_classes);

/// Balanced class assignment in random order; class sizes differ by at most one.
std::vector<int> balanced_labels(Index n_nodes, int n_classes, std::mt19937_64& rng);

/// Bernoulli edge sampling with pair probability s * B[c_i][c_j], with s chosen
/// so that the expected number of edges is N * mean_degree / 2.
DimensionGraph sample_graph(const SynthConfig& cfg, std::span<const int> labels, const ClassMixMatrix& mix,
                            std::mt19937_64& rng, int dimension_id = 0);

/// Class-conditional Gaussians: class means on a sphere of radius
/// `feature_separation`, unit isotropic noise.
Matrix sample_features(const SynthConfig& cfg, std::span<const int> labels, std::mt19937_64& rng);

/// Labels, D graphs, features and stratified splits. `homophily` holds the
/// realized ratio of every dimension.
DatasetBundle generate(const SynthConfig& cfg);

/// Independent engine for one named stream of a seed.
std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream);

}  // namespace haam
