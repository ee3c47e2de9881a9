#include <cmath>
#include <fstream>
#include <set>

#include "../support/fixtures.hpp"
#include "../support/gradcheck.hpp"
#include "doctest.h"
#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"

using namespace gtpool;
namespace fs = std::filesystem;

namespace {

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

fs::path toy_dir(const std::string& name) {
  const fs::path dir = testing::scratch_dir(name) / name;
  fs::create_directories(dir);
  return dir;
}

std::size_t count_ones(std::span<const double> row) {
  std::size_t k = 0;
  for (double v : row) {
    if (v == 1.0) ++k;
    else CHECK(v == 0.0);
  }
  return k;
}

Dataset mutag() { return parse_tudataset(testing::data_root() / "MUTAG"); }

}  // namespace

TEST_CASE("two-node toy file") {
  const fs::path dir = toy_dir("TOY");
  write(dir / "TOY_A.txt", "1, 2\n2, 1\n");
  write(dir / "TOY_graph_indicator.txt", "1\n1\n");
  write(dir / "TOY_graph_labels.txt", "1\n");
  const Dataset ds = parse_tudataset(dir);
  REQUIRE(ds.graphs.size() == 1);
  CHECK(ds.graphs[0].n == 2);
  CHECK(ds.graphs[0].edges == std::vector<Edge>{{0, 1}});
  CHECK(ds.graphs[0].label == 0);
  CHECK(!ds.warnings.empty());
}

TEST_CASE("duplicates, reversed pairs and self-loops collapse") {
  const fs::path dir = toy_dir("DUP");
  write(dir / "DUP_A.txt", "1, 2\n2, 1\n1, 2\n2, 2\n3, 2\n4, 5\n");
  write(dir / "DUP_graph_indicator.txt", "1\n1\n1\n2\n2\n");
  write(dir / "DUP_graph_labels.txt", "-1\n1\n");
  const Dataset ds = parse_tudataset(dir);
  REQUIRE(ds.graphs.size() == 2);
  CHECK(ds.graphs[0].edges == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(ds.graphs[1].edges == std::vector<Edge>{{0, 1}});
  CHECK(ds.num_classes == 2);
  CHECK(ds.class_values == std::vector<long>{-1, 1});
  CHECK(ds.graphs[0].label == 0);
  CHECK(ds.graphs[1].label == 1);
}

TEST_CASE("missing file and inconsistent edges are reported") {
  const fs::path dir = toy_dir("BAD");
  write(dir / "BAD_A.txt", "1, 2\n");
  write(dir / "BAD_graph_indicator.txt", "1\n1\n");
  try {
    parse_tudataset(dir);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("BAD_graph_labels.txt") != std::string::npos);
  }
  write(dir / "BAD_graph_labels.txt", "0\n1\n");
  write(dir / "BAD_graph_indicator.txt", "1\n1\n2\n");
  write(dir / "BAD_A.txt", "1, 2\n2, 3\n");
  try {
    parse_tudataset(dir);
    FAIL("expected ConsistencyError");
  } catch (const ConsistencyError& e) {
    CHECK(std::string(e.what()).find("BAD_A.txt:2") != std::string::npos);
  }
  write(dir / "BAD_A.txt", "1, 9\n");
  CHECK_THROWS_AS(parse_tudataset(dir), ConsistencyError);
  CHECK_THROWS_AS(parse_tudataset(dir.parent_path() / "NOPE"), FormatError);
}

TEST_CASE("MUTAG statistics") {
  const Dataset ds = mutag();
  CHECK(ds.graphs.size() == 188);
  CHECK(ds.num_classes == 2);
  CHECK(ds.mean_nodes() == doctest::Approx(17.93).epsilon(0.001));
  CHECK(ds.warnings.empty());
  std::size_t positive = 0;
  for (const Graph& g : ds.graphs) positive += g.label == 1;
  CHECK(positive == 125);
  for (const Graph& g : ds.graphs) {
    for (const Edge& e : g.edges) {
      CHECK(e.u < e.v);
      CHECK(e.v < g.n);
    }
  }
}

TEST_CASE("an unexpected graph count is logged, not fatal") {
  const fs::path dir = toy_dir("PROTEINS");
  write(dir / "PROTEINS_A.txt", "1, 2\n3, 4\n");
  write(dir / "PROTEINS_graph_indicator.txt", "1\n1\n2\n2\n");
  write(dir / "PROTEINS_graph_labels.txt", "1\n2\n");
  const Dataset ds = parse_tudataset(dir);
  CHECK(ds.graphs.size() == 2);
  REQUIRE(ds.warnings.size() == 1);
  CHECK(ds.warnings[0].find("1173") != std::string::npos);
}

TEST_CASE("round trip through the file format") {
  Dataset ds = mutag();
  const fs::path out = testing::scratch_dir("roundtrip") / "MUTAG";
  write_tudataset(ds, out);
  CHECK(parse_tudataset(out) == ds);

  Rng rng(4);
  Dataset attr;
  attr.name = "ATTR";
  attr.num_classes = 3;
  attr.class_values = {0, 1, 2};
  for (std::size_t i = 0; i < 9; ++i) {
    Graph g = testing::random_graph(3 + rng.below(5), 0.5, 1, rng);
    g.x = Matrix();
    g.label = i % 3;
    g.node_attributes = testing::random_matrix(g.n, 2, rng);
    attr.graphs.push_back(g);
  }
  const fs::path out2 = testing::scratch_dir("roundtrip_attr") / "ATTR";
  write_tudataset(attr, out2);
  CHECK(parse_tudataset(out2) == attr);
}

TEST_CASE("feature schemes") {
  const Dataset ds = build_features(mutag(), FeatureScheme::Auto);
  CHECK(ds.feature_dim == 7);
  for (const Graph& g : ds.graphs) {
    REQUIRE(g.x.rows == g.n);
    for (std::size_t r = 0; r < g.n; ++r) CHECK(count_ones(g.x.row(r)) == 1);
  }
  Dataset one;
  one.name = "ONE";
  Graph g;
  g.n = 1;
  g.node_labels = {3};
  one.graphs.push_back(g);
  Graph h = g;
  h.node_labels = {-3};
  one.graphs.push_back(h);
  const Dataset labelled = build_features(one, FeatureScheme::NodeLabelsOneHot);
  CHECK(labelled.feature_dim == 7);
  CHECK(labelled.graphs[0].x(0, 6) == 1.0);

  Dataset paths;
  paths.name = "P";
  paths.graphs = {testing::path_graph(3)};
  Graph iso;
  iso.n = 1;
  paths.graphs.push_back(iso);
  const Dataset deg = build_features(paths, FeatureScheme::Auto);
  CHECK(deg.feature_dim == kDefaultDegreeCap + 1);
  CHECK(deg.graphs[0].x(0, 1) == 1.0);
  CHECK(deg.graphs[0].x(1, 2) == 1.0);
  CHECK(deg.graphs[0].x(2, 1) == 1.0);
  CHECK(deg.graphs[1].x(0, 0) == 1.0);
  CHECK(build_features(paths, FeatureScheme::DegreeOneHot, 1).graphs[0].x(1, 1) == 1.0);
  CHECK_THROWS_AS(build_features(paths, FeatureScheme::NodeLabelsOneHot), ConfigError);
  CHECK_THROWS_AS(build_features(paths, FeatureScheme::Attributes), ConfigError);
  CHECK_THROWS_AS(parse_feature_scheme("bogus"), ConfigError);
}

TEST_CASE("gcn normalization adds self-loops") {
  Graph g = testing::path_graph(3);
  const Matrix a = g.gcn_normalized_adjacency();
  CHECK(a(0, 0) == doctest::Approx(0.5));
  CHECK(a(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(a(0, 1) == doctest::Approx(1.0 / std::sqrt(6.0)));
  CHECK(a(0, 2) == 0.0);
  Graph iso;
  iso.n = 1;
  CHECK(iso.gcn_normalized_adjacency()(0, 0) == 1.0);
}

TEST_CASE("stratified folds") {
  Dataset ds = testing::separable_dataset(10, 1);
  const FoldPlan plan = stratified_folds(ds, 10, 3);
  for (std::size_t f = 0; f < 10; ++f) {
    const auto members = plan.fold(f);
    REQUIRE(members.size() == 2);
    CHECK(ds.graphs[members[0]].label != ds.graphs[members[1]].label);
  }
  CHECK(stratified_folds(ds, 10, 3).assignments == plan.assignments);
  CHECK(FoldPlan::from_json(plan.to_json()).assignments == plan.assignments);

  const Dataset m = mutag();
  const FoldPlan mp = stratified_folds(m, 10, 0);
  std::vector<std::size_t> sizes;
  std::set<std::size_t> seen;
  for (std::size_t f = 0; f < 10; ++f) {
    const auto members = mp.fold(f);
    sizes.push_back(members.size());
    std::size_t pos = 0;
    for (std::size_t i : members) {
      CHECK(seen.insert(i).second);
      pos += m.graphs[i].label;
    }
    // 125 positives over 10 folds: ideal 12.5 per fold.
    CHECK(std::abs(static_cast<double>(pos) - 12.5) <= 1.5);
  }
  CHECK(seen.size() == 188);
  CHECK(std::count(sizes.begin(), sizes.end(), 19) == 8);
  CHECK(std::count(sizes.begin(), sizes.end(), 18) == 2);
}

TEST_CASE("small classes fall back to unstratified assignment") {
  Dataset ds = testing::separable_dataset(10, 2);
  ds.num_classes = 3;
  ds.graphs[0].label = 2;
  ds.graphs[2].label = 2;
  const FoldPlan plan = stratified_folds(ds, 5, 1);
  CHECK(plan.warnings.size() == 1);
  std::set<std::size_t> all;
  for (std::size_t f = 0; f < 5; ++f) {
    for (std::size_t i : plan.fold(f)) all.insert(i);
  }
  CHECK(all.size() == ds.graphs.size());
}

TEST_CASE("splits and batches") {
  const Dataset m = mutag();
  const FoldPlan plan = stratified_folds(m, 10, 0);
  const FoldSplit s = make_split(plan, m, 4, 0.1, 0);
  std::set<std::size_t> test(s.test.begin(), s.test.end());
  std::set<std::size_t> used;
  for (std::size_t i : s.train) {
    CHECK(test.count(i) == 0);
    CHECK(used.insert(i).second);
  }
  for (std::size_t i : s.val) {
    CHECK(test.count(i) == 0);
    CHECK(used.insert(i).second);
  }
  CHECK(used.size() + test.size() == 188);
  CHECK(s.val.size() == 17);

  const auto bs = batches(s.train, 64, 9);
  CHECK(bs.size() == 3);
  CHECK(bs[0].size() == 64);
  CHECK(batches(s.train, 64, 9) == bs);
  std::multiset<std::size_t> flat;
  for (const auto& b : bs) flat.insert(b.begin(), b.end());
  CHECK(flat == std::multiset<std::size_t>(s.train.begin(), s.train.end()));
}

TEST_CASE("erdos_renyi") {
  CHECK(erdos_renyi(4, 1.0, 1).edges.size() == 6);
  const Graph g = erdos_renyi(500, 0.2, 11);
  const double mean = 0.2 * 124750.0;
  const double sd = std::sqrt(124750.0 * 0.2 * 0.8);
  CHECK(std::abs(static_cast<double>(g.edges.size()) - mean) < 3.0 * sd);
  CHECK(erdos_renyi(500, 0.2, 11).edges == g.edges);
  CHECK(erdos_renyi(500, 0.2, 12).edges != g.edges);
  CHECK(g.x.rows == 500);
  CHECK(g.label == 0);
  CHECK_THROWS_AS(erdos_renyi(1, 0.5, 0), ArgumentError);
  CHECK_THROWS_AS(erdos_renyi(5, 0.0, 0), ArgumentError);
}
