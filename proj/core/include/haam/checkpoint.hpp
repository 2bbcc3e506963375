#pragma once

#include <filesystem>
#include <vector>

#include "haam/consensus.hpp"
#include "haam/model.hpp"

namespace haam {

/// Trained model plus everything needed to reuse it: the training and
/// consensus configuration (including the seed), the per-dimension lambda_max
/// used for rescaling, and the dataset shape it was trained on.
struct Checkpoint {
  TrainConfig config;
  ConsensusConfig consensus;
  ModelParams params;
  std::vector<double> lambda_max;
  Index n_nodes = 0;
  Index n_features = 0;
  int n_classes = 0;
  int epochs_run = 0;
  int best_epoch = 0;
  double best_val_f1_micro = 0.0;

  int n_dims() const { return params.n_dims(); }
};

/// JSON document `{"format": "haam-checkpoint", "version": 1, ...}`. Doubles
/// are written in shortest round-trip form, so save/load is bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file);
Checkpoint load_checkpoint(const std::filesystem::path& file);

/// C x C matrix as comma-separated text, one row per line (%.17g).
void export_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& file);

}  // namespace haam
