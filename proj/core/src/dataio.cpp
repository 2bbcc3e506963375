#include "haam/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "haam/error.hpp"
#include "haam/synthgen.hpp"

namespace haam {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void parse_fail(const fs::path& file, std::size_t line, const std::string& what) {
  throw DataError(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open " + file.string());
  return in;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw DataError("cannot write " + file.string());
  return out;
}

template <typename T>
T parse_number(std::string_view field, const fs::path& file, std::size_t line) {
  while (!field.empty() && (field.front() == ' ')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    parse_fail(file, line, "cannot parse number '" + std::string(field) + "'");
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r' || c == '\t'; });
}

std::vector<Index> shuffled(std::vector<Index> v, std::mt19937_64& rng) {
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

}  // namespace

void SplitSpec::validate() const {
  if (!(train > 0.0 && val > 0.0 && test > 0.0)) throw InvalidInput("split fractions must all be positive");
  if (std::abs(train + val + test - 1.0) > 1e-9) throw InvalidInput("split fractions must sum to 1");
}

Splits make_splits(std::span<const int> labels, int n_classes, const SplitSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::vector<std::vector<Index>> groups;
  if (spec.stratified) {
    groups.resize(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const int c = labels[i];
      if (c < 0 || c >= n_classes) throw InvalidInput("make_splits: label out of range");
      groups[static_cast<std::size_t>(c)].push_back(static_cast<Index>(i));
    }
  } else {
    groups.emplace_back();
    for (std::size_t i = 0; i < labels.size(); ++i) groups[0].push_back(static_cast<Index>(i));
  }

  Splits s;
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto n = static_cast<Index>(groups[c].size());
    if (n < 3) {
      throw InvalidInput("make_splits: class " + std::to_string(c) + " has " + std::to_string(n) +
                         " nodes, need at least 3");
    }
    const auto order = shuffled(groups[c], rng);
    const Index n_train = std::clamp<Index>(std::llround(spec.train * static_cast<double>(n)), 1, n - 2);
    const Index n_val = std::clamp<Index>(std::llround(spec.val * static_cast<double>(n)), 1, n - n_train - 1);
    s.train.insert(s.train.end(), order.begin(), order.begin() + n_train);
    s.val.insert(s.val.end(), order.begin() + n_train, order.begin() + n_train + n_val);
    s.test.insert(s.test.end(), order.begin() + n_train + n_val, order.end());
  }
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

void save_dataset(const DatasetBundle& bundle, const fs::path& dir, const std::string& extra_meta) {
  bundle.validate();
  fs::create_directories(dir);

  json meta;
  meta["format"] = "haam-dataset";
  meta["version"] = 1;
  meta["n_nodes"] = bundle.n_nodes();
  meta["n_features"] = bundle.n_features();
  meta["n_classes"] = bundle.n_classes;
  meta["n_dims"] = bundle.n_dims();
  std::vector<std::string> names = bundle.dimension_names;
  if (names.size() != static_cast<std::size_t>(bundle.n_dims())) {
    names.clear();
    for (int d = 0; d < bundle.n_dims(); ++d) names.push_back("dim" + std::to_string(d));
  }
  meta["dimension_names"] = names;
  std::vector<double> h = bundle.homophily;
  if (h.size() != static_cast<std::size_t>(bundle.n_dims())) {
    h.clear();
    for (int d = 0; d < bundle.n_dims(); ++d) h.push_back(homophily_ratio(bundle.graph[d], bundle.labels));
  }
  meta["homophily"] = h;
  if (!extra_meta.empty()) {
    const json extra = json::parse(extra_meta);  // must outlive the items() proxy
    for (const auto& [key, value] : extra.items()) meta[key] = value;
  }
  open_out(dir / "meta.json") << meta.dump(2) << '\n';

  {
    auto out = open_out(dir / "features.csv");
    std::string line;
    for (Index i = 0; i < bundle.features.rows(); ++i) {
      line.clear();
      for (Index f = 0; f < bundle.features.cols(); ++f) {
        if (f) line += ',';
        line += format_double(bundle.features(i, f));
      }
      out << line << '\n';
    }
  }
  {
    auto out = open_out(dir / "labels.csv");
    out << "node_id,label\n";
    for (Index i = 0; i < bundle.n_nodes(); ++i) out << i << ',' << bundle.labels[static_cast<std::size_t>(i)] << '\n';
  }
  {
    std::vector<const char*> tag(static_cast<std::size_t>(bundle.n_nodes()), nullptr);
    for (Index i : bundle.splits.train) tag[static_cast<std::size_t>(i)] = "train";
    for (Index i : bundle.splits.val) tag[static_cast<std::size_t>(i)] = "val";
    for (Index i : bundle.splits.test) tag[static_cast<std::size_t>(i)] = "test";
    auto out = open_out(dir / "splits.csv");
    out << "node_id,split\n";
    for (Index i = 0; i < bundle.n_nodes(); ++i) {
      if (tag[static_cast<std::size_t>(i)]) out << i << ',' << tag[static_cast<std::size_t>(i)] << '\n';
    }
  }
  for (int d = 0; d < bundle.n_dims(); ++d) {
    auto out = open_out(dir / ("edges_" + std::to_string(d) + ".tsv"));
    for (const Edge& e : bundle.graph[d].undirected_edges()) out << e.u << '\t' << e.v << '\n';
  }
}

DatasetBundle load_dataset(const fs::path& dir) {
  const fs::path meta_path = dir / "meta.json";
  json meta;
  try {
    auto in = open_in(meta_path);
    meta = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError("meta.json: " + std::string(e.what()));
  }

  Index n = 0, n_features = 0;
  int n_dims = 0;
  DatasetBundle b;
  try {
    n = meta.at("n_nodes").get<Index>();
    n_features = meta.at("n_features").get<Index>();
    b.n_classes = meta.at("n_classes").get<int>();
    n_dims = meta.at("n_dims").get<int>();
    if (meta.contains("dimension_names")) b.dimension_names = meta["dimension_names"].get<std::vector<std::string>>();
    if (meta.contains("homophily")) b.homophily = meta["homophily"].get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw DataError("meta.json: " + std::string(e.what()));
  }
  if (n < 0 || n_features < 0 || n_dims < 1 || b.n_classes < 1) throw DataError("meta.json: invalid sizes");

  {
    const fs::path file = dir / "features.csv";
    auto in = open_in(file);
    b.features.resize(n, n_features);
    std::string line;
    std::size_t lineno = 0;
    Index row = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      if (row >= n) parse_fail(file, lineno, "more feature rows than n_nodes = " + std::to_string(n));
      const auto fields = split_fields(line, ',');
      if (static_cast<Index>(fields.size()) != n_features) {
        parse_fail(file, lineno, "expected " + std::to_string(n_features) + " values, got " +
                                     std::to_string(fields.size()));
      }
      for (Index f = 0; f < n_features; ++f) {
        b.features(row, f) = parse_number<double>(fields[static_cast<std::size_t>(f)], file, lineno);
      }
      ++row;
    }
    if (row != n) parse_fail(file, lineno, "found " + std::to_string(row) + " feature rows, expected " + std::to_string(n));
  }

  {
    const fs::path file = dir / "labels.csv";
    auto in = open_in(file);
    b.labels.assign(static_cast<std::size_t>(n), -1);
    std::string line;
    std::size_t lineno = 0;
    Index count = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line) || (lineno == 1 && line.rfind("node_id", 0) == 0)) continue;
      const auto fields = split_fields(line, ',');
      if (fields.size() != 2) parse_fail(file, lineno, "expected node_id,label");
      const auto node = parse_number<Index>(fields[0], file, lineno);
      const auto label = parse_number<int>(fields[1], file, lineno);
      if (node < 0 || node >= n) parse_fail(file, lineno, "node id " + std::to_string(node) + " out of range");
      if (label < 0 || label >= b.n_classes) parse_fail(file, lineno, "label out of range");
      if (b.labels[static_cast<std::size_t>(node)] != -1) parse_fail(file, lineno, "duplicate node id");
      b.labels[static_cast<std::size_t>(node)] = label;
      ++count;
    }
    if (count != n) {
      parse_fail(file, lineno, "found " + std::to_string(count) + " labels, features have " + std::to_string(n) + " rows");
    }
  }

  {
    const fs::path file = dir / "splits.csv";
    auto in = open_in(file);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line) || (lineno == 1 && line.rfind("node_id", 0) == 0)) continue;
      const auto fields = split_fields(line, ',');
      if (fields.size() != 2) parse_fail(file, lineno, "expected node_id,split");
      const auto node = parse_number<Index>(fields[0], file, lineno);
      if (node < 0 || node >= n) parse_fail(file, lineno, "node id out of range");
      std::string_view tag = fields[1];
      while (!tag.empty() && (tag.back() == '\r' || tag.back() == ' ')) tag.remove_suffix(1);
      if (tag == "train") b.splits.train.push_back(node);
      else if (tag == "val") b.splits.val.push_back(node);
      else if (tag == "test") b.splits.test.push_back(node);
      else parse_fail(file, lineno, "unknown split '" + std::string(tag) + "'");
    }
  }

  std::vector<DimensionGraph> dims;
  for (int d = 0; d < n_dims; ++d) {
    const fs::path file = dir / ("edges_" + std::to_string(d) + ".tsv");
    if (!fs::exists(file)) {
      const std::string name = d < static_cast<int>(b.dimension_names.size()) ? b.dimension_names[static_cast<std::size_t>(d)]
                                                                                : std::to_string(d);
      throw DataError("missing edge file " + file.filename().string() + " for dimension " + std::to_string(d) + " (" +
                      name + ")");
    }
    auto in = open_in(file);
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (blank(line)) continue;
      const auto fields = split_fields(line, '\t');
      if (fields.size() != 2) parse_fail(file, lineno, "expected 'u<TAB>v'");
      const auto u = parse_number<Index>(fields[0], file, lineno);
      const auto v = parse_number<Index>(fields[1], file, lineno);
      if (u < 0 || v < 0 || u >= n || v >= n) parse_fail(file, lineno, "node id out of range");
      edges.push_back({u, v});
    }
    dims.push_back(symmetrize(n, edges, d));
  }
  b.graph = MultiplexGraph(std::move(dims));
  try {
    b.validate();
  } catch (const InvalidInput& e) {
    throw DataError(dir.string() + ": " + e.what());
  }
  return b;
}

DatasetBundle perturb_features(const DatasetBundle& bundle, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("perturb_features: p must lie in [0, 1]");
  DatasetBundle out = bundle;
  if (p == 0.0) return out;
  auto rng = derived_rng(seed, 0xFEA7);
  std::bernoulli_distribution drop(p);
  for (Index i = 0; i < out.features.rows(); ++i) {
    for (Index f = 0; f < out.features.cols(); ++f) {
      if (drop(rng)) out.features(i, f) = 0.0;
    }
  }
  return out;
}

DatasetBundle perturb_edges(const DatasetBundle& bundle, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("perturb_edges: p must lie in [0, 1]");
  DatasetBundle out = bundle;
  if (p == 0.0) return out;
  std::vector<DimensionGraph> dims;
  out.homophily.clear();
  for (int d = 0; d < bundle.n_dims(); ++d) {
    auto rng = derived_rng(seed, 0xED6E0000ull + static_cast<std::uint64_t>(d));
    std::bernoulli_distribution drop(p);
    std::vector<Edge> kept;
    for (const Edge& e : bundle.graph[d].undirected_edges()) {
      if (!drop(rng)) kept.push_back(e);
    }
    dims.push_back(symmetrize(bundle.n_nodes(), kept, d));
    out.homophily.push_back(homophily_ratio(dims.back(), out.labels));
  }
  out.graph = MultiplexGraph(std::move(dims));
  return out;
}

}  // namespace haam
