#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "haam/haam.hpp"

namespace haam::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNumeric = 4 };

/// Everything a command may consume. `seed` drives the generator, the splits,
/// model initialization and the perturbation trials.
struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  int threads = 1;

  SynthConfig synth = [] {
    SynthConfig s;
    s.rho = {0.9};  // broadcast to every dimension by resolve()
    return s;
  }();
  TrainConfig train;
  ConsensusConfig consensus;

  std::string dataset;
  std::string checkpoint;
  std::string out = "runs";
  std::string run_name;  // empty: <command>-<UTC timestamp>-seed<seed>

  double mask_features = 0.0;
  double drop_edges = 0.0;
  int trials = 5;
  int grid_size = 512;

  /// Copies seed/threads into the nested configs and broadcasts a single rho.
  void resolve();
  /// Throws InvalidInput on any inconsistency for `command`.
  void validate() const;
};

std::string to_json(const RunConfig& cfg);
/// Overlays the keys present in `text` onto `base`. Unknown keys are rejected.
RunConfig from_json(std::string_view text, RunConfig base = {});

/// Per-dimension predictions and consensus of a trained model on a dataset.
struct Prediction {
  std::vector<Matrix> probs;
  ConsensusResult consensus;
  std::vector<int> labels;
};

/// Throws DataError if the dataset shape differs from the one the checkpoint was trained on.
void check_compatible(const Checkpoint& ckpt, const DatasetBundle& data);

Prediction predict(const Checkpoint& ckpt, const DatasetBundle& data, int threads = 1);

enum class Perturbation { None, MaskFeatures, DropEdges };

struct RobustnessReport {
  MetricsReport clean;
  std::vector<MetricsReport> perturbed;
  MetricSummary drop_f1_micro;  // percentage points, clean - perturbed
  MetricSummary drop_f1_macro;
};

/// Test-time perturbation protocol: clean score, then `trials` independently
/// perturbed copies of the dataset scored with the same model.
RobustnessReport evaluate_robustness(const Checkpoint& ckpt, const DatasetBundle& data, Perturbation kind, double p,
                                     int trials, std::uint64_t seed, int threads = 1);

/// Runs one command line (without the program name). Never throws; returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace haam::cli
