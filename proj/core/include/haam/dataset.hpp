#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "haam/graph.hpp"
#include "haam/types.hpp"

namespace haam {

struct Splits {
  std::vector<Index> train;
  std::vector<Index> val;
  std::vector<Index> test;

  friend bool operator==(const Splits&, const Splits&) = default;
};

/// Features, labels, splits and the multiplex graph of one node classification task.
struct DatasetBundle {
  Matrix features;          // N x F
  std::vector<int> labels;  // N entries in [0, n_classes)
  int n_classes = 0;
  Splits splits;
  MultiplexGraph graph;
  std::vector<std::string> dimension_names;
  std::vector<double> homophily;  // realized h_d, informational

  Index n_nodes() const { return static_cast<Index>(labels.size()); }
  Index n_features() const { return features.cols(); }
  int n_dims() const { return graph.n_dims(); }

  /// N x C one-hot view of the labels.
  Matrix one_hot() const;

  /// Throws InvalidInput if shapes, label range or splits are inconsistent.
  void validate() const;
};

}  // namespace haam
