#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gtpool/graph.hpp"
#include "gtpool/rng.hpp"

namespace gtpool::testing {

inline Graph random_graph(std::size_t n, double p, std::size_t dim, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (rng.bernoulli(p)) pairs.emplace_back(u, v);
    }
  }
  Graph g;
  g.n = n;
  g.edges = canonical_edges(n, pairs);
  g.x = Matrix(n, dim);
  for (double& v : g.x.data) v = rng.uniform(-1.0, 1.0);
  return g;
}

inline Graph path_graph(std::size_t n, std::size_t dim = 1) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
  Graph g;
  g.n = n;
  g.edges = canonical_edges(n, pairs);
  g.x = Matrix(n, dim, 1.0);
  return g;
}

/// Two-class dataset of random graphs whose class is visible in the features.
inline Dataset separable_dataset(std::size_t per_class, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.name = "SYNTH";
  ds.num_classes = 2;
  ds.feature_dim = 3;
  ds.class_values = {0, 1};
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    Graph g = random_graph(4 + rng.below(6), 0.4, 3, rng);
    g.label = i % 2;
    for (std::size_t r = 0; r < g.n; ++r) g.x(r, 0) = g.label == 0 ? -1.0 : 1.0;
    ds.graphs.push_back(std::move(g));
  }
  return ds;
}

inline std::filesystem::path data_root() {
  if (const char* env = std::getenv("GTPOOL_DATA_ROOT"); env != nullptr && *env != '\0') return env;
  return GTPOOL_SOURCE_DATA_DIR;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("gtpool_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gtpool::testing
