#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "haam/dataset.hpp"

namespace haam {

struct SplitSpec {
  double train = 0.1;
  double val = 0.1;
  double test = 0.8;
  bool stratified = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-class (or global, if not stratified) shuffled split. Every class needs
/// at least 3 nodes so that each split receives one.
Splits make_splits(std::span<const int> labels, int n_classes, const SplitSpec& spec);

/// Writes the dataset directory:
///   meta.json       n_nodes, n_features, n_classes, n_dims, dimension_names, homophily
///   features.csv    N rows of F comma-separated values (%.17g)
///   labels.csv      header `node_id,label`
///   splits.csv      header `node_id,split` with split in {train,val,test}
///   edges_<d>.tsv   `u<TAB>v` per undirected edge, u < v
/// `extra_meta` (a JSON object serialized as text) is merged into meta.json when non-empty.
void save_dataset(const DatasetBundle& bundle, const std::filesystem::path& dir, const std::string& extra_meta = {});

/// Throws DataError naming the file (and line) on malformed input.
DatasetBundle load_dataset(const std::filesystem::path& dir);

/// Zeroes each feature entry independently with probability p.
DatasetBundle perturb_features(const DatasetBundle& bundle, double p, std::uint64_t seed);

/// Removes each undirected edge independently with probability p, per dimension.
DatasetBundle perturb_edges(const DatasetBundle& bundle, double p, std::uint64_t seed);

}  // namespace haam
