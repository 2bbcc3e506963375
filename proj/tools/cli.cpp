#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <set>
#include <sstream>

namespace haam::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr std::string_view kCommands[] = {"generate", "train", "evaluate", "filter-response", "diagnose"};

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  out << text;
  if (!out) throw DataError("failed writing " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw DataError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw InvalidInput("config: '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidInput("config: unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

template <typename T>
void read_key(const json& obj, const char* key, T& into) {
  if (obj.contains(key)) into = obj.at(key).get<T>();
}

json metrics_json(const MetricsReport& r) {
  json j;
  j["split"] = r.split;
  j["accuracy"] = r.accuracy;
  j["f1_micro"] = r.f1_micro;
  j["f1_macro"] = r.f1_macro;
  j["per_class_f1"] = r.per_class_f1;
  json conf = json::array();
  for (Index i = 0; i < r.confusion.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < r.confusion.cols(); ++k) row.push_back(r.confusion(i, k));
    conf.push_back(row);
  }
  j["confusion"] = conf;
  return j;
}

json summary_json(const MetricSummary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
  return buf;
}

fs::path make_run_dir(const RunConfig& cfg) {
  fs::path dir;
  if (!cfg.run_name.empty()) {
    dir = fs::path(cfg.out) / cfg.run_name;
  } else {
    const std::string base = cfg.command + "-" + utc_timestamp() + "-seed" + std::to_string(cfg.seed);
    dir = fs::path(cfg.out) / base;
    for (int i = 2; fs::exists(dir); ++i) dir = fs::path(cfg.out) / (base + "-" + std::to_string(i));
  }
  fs::create_directories(dir);
  write_text(dir / "config.json", to_json(cfg) + "\n");
  return dir;
}

std::string csv_header(const char* first, const char* prefix, int n, const char* extra = nullptr) {
  std::string h = first;
  if (extra) h += std::string(",") + extra;
  for (int c = 0; c < n; ++c) h += std::string(",") + prefix + std::to_string(c);
  return h + "\n";
}

void write_rows(std::ostream& os, const Matrix& m, const std::vector<int>* lead = nullptr) {
  for (Index i = 0; i < m.rows(); ++i) {
    os << i;
    if (lead) os << ',' << (*lead)[static_cast<std::size_t>(i)];
    for (Index c = 0; c < m.cols(); ++c) os << ',' << num(m(i, c));
    os << '\n';
  }
}

// ---- commands -------------------------------------------------------------

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const DatasetBundle data = generate(cfg.synth);
  const fs::path dir = make_run_dir(cfg);
  json extra;
  extra["generator"] = json::parse(to_json(cfg));
  save_dataset(data, dir, extra.dump());
  out << "dataset=" << dir.string() << "\n";
  for (int d = 0; d < data.n_dims(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    out << "homophily." << data.dimension_names[ud] << '=' << num(data.homophily[ud]) << " (target "
        << num(cfg.synth.rho[ud]) << ")\n";
  }
  return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const DatasetBundle data = load_dataset(cfg.dataset);
  const auto laps = build_rescaled_laplacians(data.graph, cfg.threads);
  const TrainResult result = train(data, laps, cfg.train);

  Checkpoint ckpt;
  ckpt.config = cfg.train;
  ckpt.consensus = cfg.consensus;
  ckpt.params = result.state.params;
  for (const auto& lap : laps) ckpt.lambda_max.push_back(lap.lambda_max);
  ckpt.n_nodes = data.n_nodes();
  ckpt.n_features = data.n_features();
  ckpt.n_classes = data.n_classes;
  ckpt.epochs_run = result.state.epochs_run;
  ckpt.best_epoch = result.state.best_epoch;
  ckpt.best_val_f1_micro = result.state.best_val_f1_micro;

  const ConsensusResult cons = proximal_consensus(result.probs, cfg.consensus);
  const std::vector<int> pred = predict_labels(cons, result.probs);
  const MetricsReport test = score(pred, data.labels, data.splits.test, data.n_classes, "test");
  const MetricsReport val = score(pred, data.labels, data.splits.val, data.n_classes, "val");

  const fs::path dir = make_run_dir(cfg);
  save_checkpoint(ckpt, dir / "checkpoint.json");
  for (int d = 0; d < data.n_dims(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    std::ostringstream os;
    os << csv_header("node_id", "p_", data.n_classes);
    write_rows(os, result.probs[ud]);
    write_text(dir / ("predictions_" + std::to_string(d) + ".csv"), os.str());
    export_matrix_csv(ckpt.params.compat[ud].h, dir / ("compat_" + std::to_string(d) + ".csv"));
  }
  {
    std::ostringstream os;
    os << csv_header("node_id", "y_", data.n_classes, "predicted_class");
    write_rows(os, cons.y_hat, &pred);
    write_text(dir / "consensus.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "iteration,objective\n";
    for (std::size_t t = 0; t < cons.objective_trace.size(); ++t) os << t + 1 << ',' << num(cons.objective_trace[t]) << '\n';
    write_text(dir / "consensus_trace.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "epoch,loss,val_f1_micro\n";
    for (std::size_t e = 0; e < result.loss_trace.size(); ++e) {
      os << e + 1 << ',' << num(result.loss_trace[e]) << ',' << num(result.val_trace[e]) << '\n';
    }
    write_text(dir / "training_trace.csv", os.str());
  }

  json m;
  m["test"] = metrics_json(test);
  m["val"] = metrics_json(val);
  m["epochs_run"] = ckpt.epochs_run;
  m["best_epoch"] = ckpt.best_epoch;
  m["best_val_f1_micro"] = ckpt.best_val_f1_micro;
  m["consensus_iterations"] = cons.iterations;
  m["consensus_nnz"] = cons.nnz;
  write_text(dir / "metrics.json", m.dump(2) + "\n");

  std::ostringstream kv;
  kv << to_key_value(test) << "epochs_run=" << ckpt.epochs_run << "\nbest_epoch=" << ckpt.best_epoch
     << "\nbest_val_f1_micro=" << num(ckpt.best_val_f1_micro) << "\nconsensus_iterations=" << cons.iterations
     << "\nconsensus_nnz=" << cons.nnz << "\n";
  write_text(dir / "metrics.txt", kv.str());

  out << "run_dir=" << dir.string() << "\n" << kv.str();
  return kOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  const DatasetBundle data = load_dataset(cfg.dataset);
  Perturbation kind = Perturbation::None;
  double p = 0.0;
  if (cfg.mask_features > 0.0) {
    kind = Perturbation::MaskFeatures;
    p = cfg.mask_features;
  } else if (cfg.drop_edges > 0.0) {
    kind = Perturbation::DropEdges;
    p = cfg.drop_edges;
  }
  const RobustnessReport rep = evaluate_robustness(ckpt, data, kind, p, cfg.trials, cfg.seed, cfg.threads);

  const char* kind_name = kind == Perturbation::MaskFeatures ? "mask_features"
                          : kind == Perturbation::DropEdges  ? "drop_edges"
                                                             : "none";
  json j;
  j["clean"] = metrics_json(rep.clean);
  j["perturbation"] = {{"kind", kind_name}, {"p", p}, {"trials", cfg.trials}};
  json trials = json::array();
  for (const auto& r : rep.perturbed) trials.push_back(metrics_json(r));
  j["trials"] = trials;
  j["drop_f1_micro_points"] = summary_json(rep.drop_f1_micro);
  j["drop_f1_macro_points"] = summary_json(rep.drop_f1_macro);

  std::ostringstream kv;
  kv << "perturbation=" << kind_name << "\np=" << num(p) << "\ntrials=" << cfg.trials
     << "\nclean_f1_micro=" << num(rep.clean.f1_micro) << "\nclean_f1_macro=" << num(rep.clean.f1_macro)
     << "\ndrop_f1_micro_mean=" << num(rep.drop_f1_micro.mean) << "\ndrop_f1_micro_std=" << num(rep.drop_f1_micro.std)
     << "\ndrop_f1_macro_mean=" << num(rep.drop_f1_macro.mean) << "\ndrop_f1_macro_std=" << num(rep.drop_f1_macro.std)
     << "\n";

  const fs::path dir = make_run_dir(cfg);
  write_text(dir / "evaluation.json", j.dump(2) + "\n");
  write_text(dir / "evaluation.txt", kv.str());
  out << "run_dir=" << dir.string() << "\n" << kv.str();
  return kOk;
}

int cmd_filter_response(const RunConfig& cfg, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  if (static_cast<int>(ckpt.lambda_max.size()) != ckpt.n_dims()) {
    throw DataError(cfg.checkpoint + ": lambda_max count does not match the number of dimensions");
  }
  const fs::path dir = make_run_dir(cfg);
  out << "run_dir=" << dir.string() << "\n";
  for (int d = 0; d < ckpt.n_dims(); ++d) {
    const auto ud = static_cast<std::size_t>(d);
    const double lmax = ckpt.lambda_max[ud];
    std::vector<double> grid(static_cast<std::size_t>(cfg.grid_size));
    for (int i = 0; i < cfg.grid_size; ++i) grid[static_cast<std::size_t>(i)] = lmax * i / (cfg.grid_size - 1);
    grid.back() = lmax;
    const FilterCoeffs fc = filter_coeffs(ckpt.params.gammas[ud]);
    const Vector low = eval_response(fc.theta_low, grid, lmax);
    const Vector high = eval_response(fc.theta_high, grid, lmax);
    const Vector composed = eval_response(fc.theta_bar, grid, lmax);

    std::ostringstream os;
    os << "lambda,low,high,composed,pointwise_product\n";
    double max_gap = 0.0;
    for (Index i = 0; i < low.size(); ++i) {
      const double pw = low[i] * high[i];
      max_gap = std::max(max_gap, std::abs(composed[i] - pw));
      os << num(grid[static_cast<std::size_t>(i)]) << ',' << num(low[i]) << ',' << num(high[i]) << ','
         << num(composed[i]) << ',' << num(pw) << '\n';
    }
    write_text(dir / ("response_" + std::to_string(d) + ".csv"), os.str());
    out << "dim" << d << ".lambda_max=" << num(lmax) << "\ndim" << d << ".max_composed_vs_product=" << num(max_gap)
        << "\n";
  }
  return kOk;
}

int cmd_diagnose(const RunConfig& cfg, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  std::vector<double> realized;
  if (!cfg.dataset.empty()) {
    const DatasetBundle data = load_dataset(cfg.dataset);
    check_compatible(ckpt, data);
    for (const auto& g : data.graph.dimensions()) realized.push_back(homophily_ratio(g, data.labels));
  }
  const auto diag = diagnose(ckpt.params);

  json dims = json::array();
  std::ostringstream kv;
  for (const auto& dd : diag) {
    const auto ud = static_cast<std::size_t>(dd.dimension_id);
    json j = {{"dimension", dd.dimension_id},
              {"l1_low", dd.coeffs.l1_low},
              {"l1_high", dd.coeffs.l1_high},
              {"l1_composed", dd.coeffs.l1_composed},
              {"bound", dd.coeffs.l1_low * dd.coeffs.l1_high},
              {"bound_satisfied", dd.coeffs.bound_satisfied},
              {"h_norm", dd.h_norm},
              {"amplification", dd.amplification}};
    const std::string p = "dim" + std::to_string(dd.dimension_id) + ".";
    kv << p << "l1_low=" << num(dd.coeffs.l1_low) << '\n'
       << p << "l1_high=" << num(dd.coeffs.l1_high) << '\n'
       << p << "l1_composed=" << num(dd.coeffs.l1_composed) << '\n'
       << p << "bound=" << num(dd.coeffs.l1_low * dd.coeffs.l1_high) << '\n'
       << p << "bound_satisfied=" << (dd.coeffs.bound_satisfied ? "true" : "false") << '\n'
       << p << "h_norm=" << num(dd.h_norm) << '\n'
       << p << "amplification=" << num(dd.amplification) << '\n';
    if (!realized.empty()) {
      j["homophily"] = realized[ud];
      kv << p << "homophily=" << num(realized[ud]) << '\n';
    }
    dims.push_back(j);
  }
  const fs::path dir = make_run_dir(cfg);
  write_text(dir / "diagnostics.json", json{{"dimensions", dims}}.dump(2) + "\n");
  write_text(dir / "diagnostics.txt", kv.str());
  out << "run_dir=" << dir.string() << "\n" << kv.str();
  return kOk;
}

// ---- argument parsing -----------------------------------------------------

void add_common(CLI::App& sub, RunConfig& cfg, std::string& config_path) {
  sub.add_option("--config", config_path, "JSON config; flags given on the command line take precedence");
  sub.add_option("--threads", cfg.threads, "worker threads (1 = bit-exact reproducible)");
  sub.add_option("--seed", cfg.seed, "random seed");
  sub.add_option("--out", cfg.out, "root directory for run outputs");
  sub.add_option("--run-name", cfg.run_name, "run directory name (default: <command>-<timestamp>-seed<seed>)");
}

void add_synth(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--n", cfg.synth.n_nodes, "number of nodes");
  sub.add_option("--classes", cfg.synth.n_classes, "number of classes");
  sub.add_option("--dims", cfg.synth.n_dims, "number of dimensions");
  sub.add_option("--rho", cfg.synth.rho, "target homophily per dimension (comma separated, or one value for all)")
      ->delimiter(',');
  sub.add_option("--mean-degree", cfg.synth.mean_degree, "expected mean degree per dimension");
  sub.add_option("--features", cfg.synth.feature_dim, "feature dimension");
  sub.add_option("--separation", cfg.synth.feature_separation, "distance of class means from the origin");
  sub.add_option("--train-frac", cfg.synth.split.train, "training fraction");
  sub.add_option("--val-frac", cfg.synth.split.val, "validation fraction");
  sub.add_option("--test-frac", cfg.synth.split.test, "test fraction");
}

void add_train(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--dataset", cfg.dataset, "dataset directory");
  sub.add_option("--k", cfg.train.k, "Chebyshev degree of each branch");
  sub.add_option("--hidden", cfg.train.hidden, "hidden layer sizes (comma separated)")->delimiter(',');
  sub.add_option("--lr", cfg.train.learning_rate, "Adam learning rate");
  sub.add_option("--alpha", cfg.train.alpha, "weight decay on MLP weights");
  sub.add_option("--epochs", cfg.train.max_epochs, "maximum epochs");
  sub.add_option("--patience", cfg.train.patience, "early-stopping patience");
  sub.add_option("--gamma0", cfg.train.gamma0, "fixed base coefficient of both branches");
  sub.add_option("--beta", cfg.consensus.beta, "consensus sparsity weight");
  sub.add_option("--consensus-iters", cfg.consensus.iterations, "consensus iterations");
}

struct Parsed {
  RunConfig cfg;
  std::string config_path;
};

/// One parse pass. Options write straight into `p.cfg`, so a second pass over
/// a config-initialized RunConfig gives flags precedence over the file.
CLI::App* build(CLI::App& app, Parsed& p, std::vector<CLI::App*>& subs) {
  auto& cfg = p.cfg;
  app.require_subcommand(1);
  auto* gen = app.add_subcommand("generate", "sample a synthetic multiplex dataset");
  auto* trn = app.add_subcommand("train", "train a model and run the consensus step");
  auto* evl = app.add_subcommand("evaluate", "score a checkpoint under test-time perturbations");
  auto* flt = app.add_subcommand("filter-response", "tabulate learned spectral responses");
  auto* dgn = app.add_subcommand("diagnose", "coefficient norms and stability diagnostics");
  subs = {gen, trn, evl, flt, dgn};
  for (auto* s : subs) add_common(*s, cfg, p.config_path);
  add_synth(*gen, cfg);
  add_train(*trn, cfg);
  evl->add_option("--checkpoint", cfg.checkpoint, "checkpoint.json from a training run");
  evl->add_option("--dataset", cfg.dataset, "dataset directory");
  auto* mask = evl->add_option("--mask-features", cfg.mask_features, "probability of zeroing each feature entry");
  auto* drop = evl->add_option("--drop-edges", cfg.drop_edges, "probability of removing each edge");
  mask->excludes(drop);
  evl->add_option("--trials", cfg.trials, "number of perturbation trials");
  flt->add_option("--checkpoint", cfg.checkpoint, "checkpoint.json from a training run");
  flt->add_option("--grid-size", cfg.grid_size, "number of eigenvalue grid points");
  dgn->add_option("--checkpoint", cfg.checkpoint, "checkpoint.json from a training run");
  dgn->add_option("--dataset", cfg.dataset, "optional dataset directory (adds realized homophily)");
  return &app;
}

std::string selected(const std::vector<CLI::App*>& subs) {
  for (auto* s : subs) {
    if (s->parsed()) return s->get_name();
  }
  return {};
}

}  // namespace

// ---- RunConfig ------------------------------------------------------------

void RunConfig::resolve() {
  synth.seed = seed;
  synth.split.seed = seed;
  train.seed = seed;
  train.threads = threads;
  if (synth.rho.size() == 1 && synth.n_dims > 1) synth.rho.assign(static_cast<std::size_t>(synth.n_dims), synth.rho[0]);
}

void RunConfig::validate() const {
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
    throw InvalidInput("unknown command '" + command + "'");
  }
  if (threads < 1) throw InvalidInput("--threads must be >= 1");
  if (out.empty()) throw InvalidInput("--out must not be empty");
  if (command == "generate") synth.validate();
  if (command == "train") {
    if (dataset.empty()) throw InvalidInput("train: --dataset is required");
    train.validate();
    consensus.validate();
  }
  if (command == "evaluate") {
    if (dataset.empty() || checkpoint.empty()) throw InvalidInput("evaluate: --checkpoint and --dataset are required");
    if (mask_features > 0.0 && drop_edges > 0.0) {
      throw InvalidInput("evaluate: --mask-features and --drop-edges are mutually exclusive");
    }
    for (double p : {mask_features, drop_edges}) {
      if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("evaluate: perturbation probability must lie in [0, 1]");
    }
    if (trials < 1) throw InvalidInput("evaluate: --trials must be >= 1");
  }
  if (command == "filter-response") {
    if (checkpoint.empty()) throw InvalidInput("filter-response: --checkpoint is required");
    if (grid_size < 2) throw InvalidInput("filter-response: --grid-size must be >= 2");
  }
  if (command == "diagnose" && checkpoint.empty()) throw InvalidInput("diagnose: --checkpoint is required");
}

std::string to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["synth"] = {{"n", cfg.synth.n_nodes},
                {"classes", cfg.synth.n_classes},
                {"dims", cfg.synth.n_dims},
                {"rho", cfg.synth.rho},
                {"mean_degree", cfg.synth.mean_degree},
                {"features", cfg.synth.feature_dim},
                {"separation", cfg.synth.feature_separation}};
  j["split"] = {{"train", cfg.synth.split.train},
                {"val", cfg.synth.split.val},
                {"test", cfg.synth.split.test},
                {"stratified", cfg.synth.split.stratified}};
  j["train"] = {{"k", cfg.train.k},
                {"hidden", cfg.train.hidden},
                {"lr", cfg.train.learning_rate},
                {"alpha", cfg.train.alpha},
                {"epochs", cfg.train.max_epochs},
                {"patience", cfg.train.patience},
                {"gamma0", cfg.train.gamma0}};
  j["consensus"] = {
      {"beta", cfg.consensus.beta}, {"iterations", cfg.consensus.iterations}, {"tolerance", cfg.consensus.tolerance}};
  j["dataset"] = cfg.dataset;
  j["checkpoint"] = cfg.checkpoint;
  j["out"] = cfg.out;
  j["run_name"] = cfg.run_name;
  j["evaluate"] = {{"mask_features", cfg.mask_features}, {"drop_edges", cfg.drop_edges}, {"trials", cfg.trials}};
  j["grid_size"] = cfg.grid_size;
  return j.dump(2);
}

RunConfig from_json(std::string_view text, RunConfig base) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: not valid JSON: ") + e.what());
  }
  try {
    reject_unknown(j,
                   {"command", "seed", "threads", "synth", "split", "train", "consensus", "dataset", "checkpoint",
                    "out", "run_name", "evaluate", "grid_size"},
                   "");
    read_key(j, "command", base.command);
    read_key(j, "seed", base.seed);
    read_key(j, "threads", base.threads);
    if (j.contains("synth")) {
      const auto& s = j["synth"];
      reject_unknown(s, {"n", "classes", "dims", "rho", "mean_degree", "features", "separation"}, "synth");
      read_key(s, "n", base.synth.n_nodes);
      read_key(s, "classes", base.synth.n_classes);
      read_key(s, "dims", base.synth.n_dims);
      read_key(s, "rho", base.synth.rho);
      read_key(s, "mean_degree", base.synth.mean_degree);
      read_key(s, "features", base.synth.feature_dim);
      read_key(s, "separation", base.synth.feature_separation);
    }
    if (j.contains("split")) {
      const auto& s = j["split"];
      reject_unknown(s, {"train", "val", "test", "stratified"}, "split");
      read_key(s, "train", base.synth.split.train);
      read_key(s, "val", base.synth.split.val);
      read_key(s, "test", base.synth.split.test);
      read_key(s, "stratified", base.synth.split.stratified);
    }
    if (j.contains("train")) {
      const auto& t = j["train"];
      reject_unknown(t, {"k", "hidden", "lr", "alpha", "epochs", "patience", "gamma0"}, "train");
      read_key(t, "k", base.train.k);
      read_key(t, "hidden", base.train.hidden);
      read_key(t, "lr", base.train.learning_rate);
      read_key(t, "alpha", base.train.alpha);
      read_key(t, "epochs", base.train.max_epochs);
      read_key(t, "patience", base.train.patience);
      read_key(t, "gamma0", base.train.gamma0);
    }
    if (j.contains("consensus")) {
      const auto& c = j["consensus"];
      reject_unknown(c, {"beta", "iterations", "tolerance"}, "consensus");
      read_key(c, "beta", base.consensus.beta);
      read_key(c, "iterations", base.consensus.iterations);
      read_key(c, "tolerance", base.consensus.tolerance);
    }
    read_key(j, "dataset", base.dataset);
    read_key(j, "checkpoint", base.checkpoint);
    read_key(j, "out", base.out);
    read_key(j, "run_name", base.run_name);
    if (j.contains("evaluate")) {
      const auto& e = j["evaluate"];
      reject_unknown(e, {"mask_features", "drop_edges", "trials"}, "evaluate");
      read_key(e, "mask_features", base.mask_features);
      read_key(e, "drop_edges", base.drop_edges);
      read_key(e, "trials", base.trials);
    }
    read_key(j, "grid_size", base.grid_size);
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config: ") + e.what());
  }
  return base;
}

// ---- in-process helpers ---------------------------------------------------

void check_compatible(const Checkpoint& ckpt, const DatasetBundle& data) {
  auto mismatch = [](const char* what, long long want, long long got) {
    throw DataError("checkpoint/dataset mismatch: " + std::string(what) + " " + std::to_string(want) + " vs " +
                    std::to_string(got));
  };
  if (ckpt.n_nodes != data.n_nodes()) mismatch("n_nodes", ckpt.n_nodes, data.n_nodes());
  if (ckpt.n_features != data.n_features()) mismatch("n_features", ckpt.n_features, data.n_features());
  if (ckpt.n_classes != data.n_classes) mismatch("n_classes", ckpt.n_classes, data.n_classes);
  if (ckpt.n_dims() != data.n_dims()) mismatch("n_dims", ckpt.n_dims(), data.n_dims());
}

Prediction predict(const Checkpoint& ckpt, const DatasetBundle& data, int threads) {
  check_compatible(ckpt, data);
  const auto laps = build_rescaled_laplacians(data.graph, threads);
  Prediction p;
  p.probs = forward(ckpt.params, laps, data.features, threads).probs();
  p.consensus = proximal_consensus(p.probs, ckpt.consensus);
  p.labels = predict_labels(p.consensus, p.probs);
  return p;
}

RobustnessReport evaluate_robustness(const Checkpoint& ckpt, const DatasetBundle& data, Perturbation kind, double p,
                                     int trials, std::uint64_t seed, int threads) {
  if (trials < 1) throw InvalidInput("evaluate_robustness: trials must be >= 1");
  RobustnessReport rep;
  rep.clean = score(predict(ckpt, data, threads).labels, data.labels, data.splits.test, data.n_classes, "test");
  std::vector<double> d_micro, d_macro;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(t + 1);
    MetricsReport r;
    if (kind == Perturbation::None || p == 0.0) {
      r = rep.clean;
    } else {
      const DatasetBundle noisy =
          kind == Perturbation::MaskFeatures ? perturb_features(data, p, trial_seed) : perturb_edges(data, p, trial_seed);
      r = score(predict(ckpt, noisy, threads).labels, data.labels, data.splits.test, data.n_classes, "test");
    }
    d_micro.push_back(100.0 * (rep.clean.f1_micro - r.f1_micro));
    d_macro.push_back(100.0 * (rep.clean.f1_macro - r.f1_macro));
    rep.perturbed.push_back(std::move(r));
  }
  rep.drop_f1_micro = summarize(d_micro);
  rep.drop_f1_macro = summarize(d_macro);
  return rep;
}

// ---- entry point ----------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 consumes vectors back to front

  // First pass only locates the command and --config.
  Parsed first;
  std::string command;
  {
    CLI::App app{"haam: multiplex node classification with composed spectral filters", "haam"};
    std::vector<CLI::App*> subs;
    build(app, first, subs);
    try {
      auto copy = reversed;
      app.parse(copy);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }
    command = selected(subs);
  }

  Parsed second;
  try {
    if (!first.config_path.empty()) second.cfg = from_json(read_text(first.config_path));
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidInput& e) {
    err << "error: " << first.config_path << ": " << e.what() << "\n";
    return kUsage;
  }
  {
    CLI::App app{"haam", "haam"};
    std::vector<CLI::App*> subs;
    build(app, second, subs);
    try {
      auto copy = reversed;
      app.parse(copy);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? kOk : kUsage;
    }
  }

  RunConfig& cfg = second.cfg;
  cfg.command = command;
  try {
    cfg.resolve();
    cfg.validate();
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto previous = set_warning_handler([&err](std::string_view msg) { err << "warning: " << msg << "\n"; });
  int code = kOk;
  try {
    if (command == "generate") code = cmd_generate(cfg, out);
    if (command == "train") code = cmd_train(cfg, out);
    if (command == "evaluate") code = cmd_evaluate(cfg, out);
    if (command == "filter-response") code = cmd_filter_response(cfg, out);
    if (command == "diagnose") code = cmd_diagnose(cfg, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    code = kNumeric;
  } catch (const Error& e) {  // DataError, and InvalidInput raised by inconsistent inputs on disk
    err << "data error: " << e.what() << "\n";
    code = kData;
  } catch (const fs::filesystem_error& e) {
    err << "data error: " << e.what() << "\n";
    code = kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kData;
  }
  set_warning_handler(std::move(previous));
  return code;
}

}  // namespace haam::cli
