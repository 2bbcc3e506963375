#include "haam/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

#include "haam/error.hpp"

namespace haam {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "haam-checkpoint";
constexpr int kVersion = 1;

template <typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived>& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

template <typename Out>
void matrix_from_json(const json& j, Out& m) {
  const auto rows = j.at("rows").get<Index>();
  const auto cols = j.at("cols").get<Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Index>(data.size()) != rows * cols) {
    throw DataError("checkpoint: matrix payload has wrong size");
  }
  m.resize(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index k = 0; k < cols; ++k) m(i, k) = data[static_cast<std::size_t>(i * cols + k)];
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& file) {
  json j;
  j["format"] = kFormat;
  j["version"] = kVersion;
  const TrainConfig& c = ckpt.config;
  j["config"] = {{"k", c.k},         {"hidden", c.hidden},         {"learning_rate", c.learning_rate},
                 {"alpha", c.alpha}, {"max_epochs", c.max_epochs}, {"patience", c.patience},
                 {"seed", c.seed},   {"gamma0", c.gamma0}};
  j["consensus"] = {{"beta", ckpt.consensus.beta},
                    {"iterations", ckpt.consensus.iterations},
                    {"tolerance", ckpt.consensus.tolerance}};
  j["shape"] = {{"n_nodes", ckpt.n_nodes}, {"n_features", ckpt.n_features}, {"n_classes", ckpt.n_classes},
                {"n_dims", ckpt.n_dims()}};
  j["training"] = {{"epochs_run", ckpt.epochs_run},
                   {"best_epoch", ckpt.best_epoch},
                   {"best_val_f1_micro", ckpt.best_val_f1_micro}};
  j["lambda_max"] = ckpt.lambda_max;

  json layers = json::array();
  for (const auto& layer : ckpt.params.mlp.layers) {
    layers.push_back({{"weight", matrix_to_json(layer.weight)}, {"bias", matrix_to_json(layer.bias)}});
  }
  j["mlp"] = layers;

  json dims = json::array();
  for (int d = 0; d < ckpt.n_dims(); ++d) {
    const auto& g = ckpt.params.gammas[static_cast<std::size_t>(d)];
    std::vector<double> gamma(g.gamma.data(), g.gamma.data() + g.gamma.size());
    dims.push_back({{"gamma0", g.gamma0},
                    {"gamma", gamma},
                    {"compat", matrix_to_json(ckpt.params.compat[static_cast<std::size_t>(d)].h)}});
  }
  j["dimensions"] = dims;

  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write checkpoint " + file.string());
  out << j.dump(1) << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open checkpoint " + file.string());
  Checkpoint ckpt;
  try {
    const json j = json::parse(in);
    if (j.at("format").get<std::string>() != kFormat) throw DataError("checkpoint: unrecognized format");
    if (j.at("version").get<int>() != kVersion) {
      throw DataError("checkpoint: unsupported version " + std::to_string(j.at("version").get<int>()));
    }
    const json& c = j.at("config");
    ckpt.config.k = c.at("k").get<int>();
    ckpt.config.hidden = c.at("hidden").get<std::vector<int>>();
    ckpt.config.learning_rate = c.at("learning_rate").get<double>();
    ckpt.config.alpha = c.at("alpha").get<double>();
    ckpt.config.max_epochs = c.at("max_epochs").get<int>();
    ckpt.config.patience = c.at("patience").get<int>();
    ckpt.config.seed = c.at("seed").get<std::uint64_t>();
    ckpt.config.gamma0 = c.at("gamma0").get<double>();
    const json& cc = j.at("consensus");
    ckpt.consensus.beta = cc.at("beta").get<double>();
    ckpt.consensus.iterations = cc.at("iterations").get<int>();
    ckpt.consensus.tolerance = cc.at("tolerance").get<double>();
    const json& shape = j.at("shape");
    ckpt.n_nodes = shape.at("n_nodes").get<Index>();
    ckpt.n_features = shape.at("n_features").get<Index>();
    ckpt.n_classes = shape.at("n_classes").get<int>();
    const json& tr = j.at("training");
    ckpt.epochs_run = tr.at("epochs_run").get<int>();
    ckpt.best_epoch = tr.at("best_epoch").get<int>();
    ckpt.best_val_f1_micro = tr.at("best_val_f1_micro").get<double>();
    ckpt.lambda_max = j.at("lambda_max").get<std::vector<double>>();

    for (const json& layer : j.at("mlp")) {
      DenseLayer l;
      matrix_from_json(layer.at("weight"), l.weight);
      matrix_from_json(layer.at("bias"), l.bias);
      ckpt.params.mlp.layers.push_back(std::move(l));
    }
    int d = 0;
    for (const json& dim : j.at("dimensions")) {
      GammaParams g;
      g.gamma0 = dim.at("gamma0").get<double>();
      const auto gamma = dim.at("gamma").get<std::vector<double>>();
      g.gamma = Eigen::Map<const Vector>(gamma.data(), static_cast<Index>(gamma.size()));
      g.dimension_id = d;
      CompatibilityMatrix h;
      matrix_from_json(dim.at("compat"), h.h);
      h.dimension_id = d;
      ckpt.params.gammas.push_back(std::move(g));
      ckpt.params.compat.push_back(std::move(h));
      ++d;
    }
    if (static_cast<int>(ckpt.lambda_max.size()) != ckpt.n_dims() ||
        shape.at("n_dims").get<int>() != ckpt.n_dims()) {
      throw DataError("checkpoint: dimension count inconsistent");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint " + file.filename().string() + ": " + e.what());
  }
  return ckpt;
}

void export_matrix_csv(const Eigen::MatrixXd& m, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  char buf[32];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace haam
