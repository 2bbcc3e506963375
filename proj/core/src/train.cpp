#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "haam/error.hpp"
#include "haam/model.hpp"

namespace haam {

void TrainConfig::validate() const {
  if (k < 1) throw InvalidInput("train config: k must be >= 1");
  for (int h : hidden) {
    if (h <= 0) throw InvalidInput("train config: hidden sizes must be positive");
  }
  if (!(learning_rate > 0.0)) throw InvalidInput("train config: learning rate must be positive");
  if (!(alpha >= 0.0)) throw InvalidInput("train config: alpha must be nonnegative");
  if (max_epochs < 1) throw InvalidInput("train config: max_epochs must be >= 1");
  if (patience < 1) throw InvalidInput("train config: patience must be >= 1");
  if (!(gamma0 > 0.0)) throw InvalidInput("train config: gamma0 must be positive");
  if (threads < 1) throw InvalidInput("train config: threads must be >= 1");
}

ModelParams init_model(const DatasetBundle& data, const TrainConfig& cfg) {
  cfg.validate();
  ModelParams p;
  p.mlp = init_mlp(data.n_features(), cfg.hidden, data.n_classes, cfg.seed);
  for (int d = 0; d < data.n_dims(); ++d) {
    GammaParams g;
    g.gamma0 = cfg.gamma0;
    g.gamma = Vector::Constant(cfg.k, 1.0 / (cfg.k + 1));
    g.dimension_id = d;
    p.gammas.push_back(std::move(g));
    p.compat.push_back(init_compatibility(data.graph[d], data.labels, data.splits.train, data.n_classes));
  }
  return p;
}

std::vector<int> mean_prediction(std::span<const Matrix> probs) {
  if (probs.empty()) return {};
  Matrix mean = probs[0];
  for (std::size_t d = 1; d < probs.size(); ++d) mean += probs[d];
  std::vector<int> out(static_cast<std::size_t>(mean.rows()));
  for (Index i = 0; i < mean.rows(); ++i) {
    Index arg = 0;
    mean.row(i).maxCoeff(&arg);  // first maximal index
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

namespace {

double split_accuracy(std::span<const int> pred, std::span<const int> labels, std::span<const Index> idx) {
  if (idx.empty()) return 0.0;
  Index hits = 0;
  for (Index i : idx) hits += pred[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(i)];
  return static_cast<double>(hits) / static_cast<double>(idx.size());
}

}  // namespace

TrainResult train(const DatasetBundle& data, std::span<const RescaledLaplacian> laps, const TrainConfig& cfg) {
  data.validate();
  cfg.validate();
  if (static_cast<int>(laps.size()) != data.n_dims()) {
    throw InvalidInput("train: Laplacian count does not match dimension count");
  }

  TrainResult result;
  ModelParams params = init_model(data, cfg);
  AdamOptimizer adam(cfg.learning_rate);

  ModelParams best = params;
  double best_val = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int since_best = 0;
  int epoch = 0;
  for (; epoch < cfg.max_epochs; ++epoch) {
    const ForwardPass fwd = forward(params, laps, data.features, cfg.threads);
    const auto scores = fwd.scores();
    const double j = loss(scores, data.labels, data.splits.train, params.mlp, cfg.alpha);
    if (!std::isfinite(j)) {
      std::ostringstream msg;
      msg << "training diverged at epoch " << epoch << ": loss = " << j;
      throw NumericError(msg.str());
    }
    result.loss_trace.push_back(j);

    const double val = split_accuracy(mean_prediction(fwd.probs()), data.labels, data.splits.val);
    result.val_trace.push_back(val);
    if (val > best_val) {
      best_val = val;
      best = params;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      ++epoch;
      break;
    }

    ModelParams grads;
    try {
      grads = backward(params, laps, fwd, data.labels, data.splits.train, cfg.alpha, cfg.threads);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ")");
    }
    adam.step(params, grads);
  }

  result.state.params = std::move(best);
  result.state.epochs_run = epoch;
  result.state.best_epoch = best_epoch;
  result.state.best_val_f1_micro = best_val;
  result.probs = forward(result.state.params, laps, data.features, cfg.threads).probs();
  return result;
}

TrainResult train(const DatasetBundle& data, const TrainConfig& cfg) {
  const auto laps = build_rescaled_laplacians(data.graph, cfg.threads);
  return train(data, laps, cfg);
}

}  // namespace haam
