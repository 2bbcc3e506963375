#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <random>

#include "haam/dataio.hpp"
#include "haam/error.hpp"
#include "haam/synthgen.hpp"

using namespace haam;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("haam_test_dataio_" + name);
  fs::remove_all(p);
  return p;
}

DatasetBundle small_bundle(std::uint64_t seed = 4) {
  SynthConfig cfg;
  cfg.n_nodes = 120;
  cfg.seed = seed;
  return generate(cfg);
}

}  // namespace

TEST_CASE("save/load round trip is bit exact") {
  for (std::uint64_t seed : {1u, 2u}) {
    auto b = small_bundle(seed);
    b.features(0, 0) = 0.1 + 0.2;  // not representable in short decimal
    b.features(1, 1) = -1e-300;
    const auto dir = scratch("roundtrip" + std::to_string(seed));
    save_dataset(b, dir);
    const auto l = load_dataset(dir);
    CHECK(l.features == b.features);
    CHECK(l.labels == b.labels);
    CHECK(l.graph == b.graph);
    CHECK(l.splits == b.splits);
    CHECK(l.n_classes == b.n_classes);
    CHECK(l.homophily == b.homophily);
    CHECK(l.dimension_names == b.dimension_names);
  }
}

TEST_CASE("extra metadata is merged into meta.json") {
  const auto dir = scratch("meta");
  save_dataset(small_bundle(), dir, R"({"generator": {"seed": 7, "rho": [0.5]}})");
  std::ifstream in(dir / "meta.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("\"generator\": {") != std::string::npos);
  CHECK(text.find("\"seed\": 7") != std::string::npos);
  CHECK(text.find("null") == std::string::npos);
  CHECK_NOTHROW(load_dataset(dir));
}

TEST_CASE("edges are stored once with u < v") {
  const auto b = small_bundle();
  const auto dir = scratch("edges");
  save_dataset(b, dir);
  std::ifstream in(dir / "edges_0.tsv");
  Index u, v, lines = 0;
  while (in >> u >> v) {
    CHECK(u < v);
    ++lines;
  }
  CHECK(lines == b.graph[0].n_edges());
}

TEST_CASE("load errors name the problem") {
  const auto b = small_bundle();
  SUBCASE("missing edge file") {
    const auto dir = scratch("missing");
    save_dataset(b, dir);
    fs::remove(dir / "edges_2.tsv");
    try {
      load_dataset(dir);
      FAIL("expected an error");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("dimension 2") != std::string::npos);
    }
  }
  SUBCASE("feature/label count mismatch") {
    const auto dir = scratch("mismatch");
    save_dataset(b, dir);
    std::ofstream(dir / "labels.csv", std::ios::app) << "120,0\n";
    CHECK_THROWS_AS(load_dataset(dir), DataError);
  }
  SUBCASE("malformed number reports file and line") {
    const auto dir = scratch("malformed");
    save_dataset(b, dir);
    std::ofstream(dir / "edges_1.tsv", std::ios::app) << "3\tabc\n";
    try {
      load_dataset(dir);
      FAIL("expected an error");
    } catch (const DataError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("edges_1.tsv:") != std::string::npos);
      CHECK(msg.find(std::to_string(b.graph[1].n_edges() + 1)) != std::string::npos);
    }
  }
}

TEST_CASE("make_splits") {
  std::vector<int> labels(600);
  for (int i = 0; i < 600; ++i) labels[i] = i % 4;
  SplitSpec spec;
  spec.seed = 9;
  const auto s = make_splits(labels, 4, spec);
  CHECK(s.train.size() == 60);
  CHECK(s.val.size() == 60);
  CHECK(s.test.size() == 480);
  std::vector<int> per_class(4, 0);
  for (Index i : s.train) ++per_class[labels[i]];
  CHECK(per_class == std::vector<int>{15, 15, 15, 15});
  CHECK(make_splits(labels, 4, spec) == s);

  spec.test = 0.7;
  CHECK_THROWS_AS(make_splits(labels, 4, spec), InvalidInput);
  spec.test = 0.8;
  CHECK_THROWS_AS(make_splits(std::vector<int>{0, 0, 1, 1, 1}, 2, spec), InvalidInput);
}

TEST_CASE("feature masking") {
  const auto b = small_bundle();
  CHECK(perturb_features(b, 0.0, 1).features == b.features);
  CHECK(perturb_features(b, 1.0, 1).features.isZero());

  DatasetBundle big = b;
  big.features = Matrix::Ones(2000, 60);
  big.labels.assign(2000, 0);
  const auto m = perturb_features(big, 0.5, 3);
  const double zeroed = static_cast<double>((m.features.array() == 0.0).count()) / m.features.size();
  CHECK(zeroed >= 0.495);
  CHECK(zeroed <= 0.505);

  const auto p = perturb_features(b, 0.3, 2);
  CHECK(p.labels == b.labels);
  CHECK(p.splits == b.splits);
  CHECK(p.graph == b.graph);
}

TEST_CASE("edge dropping") {
  const auto b = small_bundle();
  CHECK(perturb_edges(b, 0.0, 1).graph == b.graph);
  const auto empty = perturb_edges(b, 1.0, 1);
  for (int d = 0; d < empty.n_dims(); ++d) CHECK(empty.graph[d].n_entries() == 0);

  SynthConfig cfg;
  cfg.n_nodes = 2000;
  cfg.n_dims = 1;
  cfg.rho = {0.5};
  const auto big = generate(cfg);
  REQUIRE(big.graph[0].n_edges() >= 10000);
  const auto dropped = perturb_edges(big, 0.5, 7);
  const double kept = static_cast<double>(dropped.graph[0].n_edges()) / big.graph[0].n_edges();
  CHECK(kept >= 0.48);
  CHECK(kept <= 0.52);
  CHECK(dropped.labels == big.labels);
  CHECK(dropped.splits == big.splits);
}
