#include "haam/dataset.hpp"

#include <string>

#include "haam/error.hpp"

namespace haam {

Matrix DatasetBundle::one_hot() const {
  Matrix y = Matrix::Zero(n_nodes(), n_classes);
  for (Index i = 0; i < n_nodes(); ++i) y(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  return y;
}

void DatasetBundle::validate() const {
  const Index n = n_nodes();
  if (features.rows() != n) {
    throw InvalidInput("dataset: features have " + std::to_string(features.rows()) + " rows but there are " +
                       std::to_string(n) + " labels");
  }
  if (graph.n_dims() == 0) throw InvalidInput("dataset: graph has no dimensions");
  if (graph.n_nodes() != n) {
    throw InvalidInput("dataset: graph has " + std::to_string(graph.n_nodes()) + " nodes, labels have " +
                       std::to_string(n));
  }
  if (n_classes < 1) throw InvalidInput("dataset: n_classes must be positive");
  for (int c : labels) {
    if (c < 0 || c >= n_classes) throw InvalidInput("dataset: label " + std::to_string(c) + " out of range");
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto* split : {&splits.train, &splits.val, &splits.test}) {
    for (Index i : *split) {
      if (i < 0 || i >= n) throw InvalidInput("dataset: split index out of range");
      if (seen[static_cast<std::size_t>(i)]) throw InvalidInput("dataset: splits overlap at node " + std::to_string(i));
      seen[static_cast<std::size_t>(i)] = 1;
    }
  }
  std::vector<char> in_train(static_cast<std::size_t>(n_classes), 0);
  for (Index i : splits.train) in_train[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])] = 1;
  for (int c = 0; c < n_classes; ++c) {
    if (!in_train[static_cast<std::size_t>(c)]) {
      throw InvalidInput("dataset: class " + std::to_string(c) + " has no training node");
    }
  }
}

}  // namespace haam
