#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gtpool/matrix.hpp"

namespace gtpool {

struct Edge {
  std::uint32_t u;
  std::uint32_t v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Undirected simple graph: edges are stored once with u < v, sorted, and never
/// include self-loops (the GCN and the local score mask add those themselves).
struct Graph {
  std::size_t n = 0;
  std::vector<Edge> edges;
  Matrix x;
  std::size_t label = 0;
  /// Raw categorical node labels from the source files, empty if absent.
  std::vector<long> node_labels;
  /// Raw continuous node attributes (n x k), empty if absent.
  Matrix node_attributes;

  std::vector<std::size_t> degrees() const;
  /// n x n 0/1 matrix, optionally with ones on the diagonal.
  Matrix dense_adjacency(bool with_self_loops) const;
  /// D^-1/2 (A + I) D^-1/2 with degrees taken from A + I.
  Matrix gcn_normalized_adjacency() const;
  /// Subgraph induced by `idx` (ascending), relabeled 0..idx.size()-1. Features are not carried.
  Graph induced(std::span<const std::size_t> idx) const;

  friend bool operator==(const Graph&, const Graph&) = default;
};

/// Canonicalizes an edge list: drops self-loops, orders each pair, removes
/// duplicates and reversed copies. Throws IndexError for endpoints >= n.
std::vector<Edge> canonical_edges(std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> pairs);

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::size_t num_classes = 0;
  std::size_t feature_dim = 0;
  /// Original graph label value for each contiguous class id.
  std::vector<long> class_values;
  /// Non-fatal observations made while loading (e.g. unexpected graph counts).
  std::vector<std::string> warnings;

  std::vector<std::size_t> labels() const;
  double mean_nodes() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Reads `<dir>/<NAME>_A.txt`, `_graph_indicator.txt`, `_graph_labels.txt` and the
/// optional `_node_labels.txt` / `_node_attributes.txt`, where NAME is the last
/// component of `dir`. Node features are left empty; see build_features.
Dataset parse_tudataset(const std::filesystem::path& dir);

/// Writes `dataset` in the same layout under `dir/<dataset.name>_*.txt`. Edges
/// are written in both directions and graph labels as their original values.
void write_tudataset(const Dataset& dataset, const std::filesystem::path& dir);

enum class FeatureScheme { Auto, NodeLabelsOneHot, DegreeOneHot, Attributes };

inline constexpr std::size_t kDefaultDegreeCap = 64;

FeatureScheme parse_feature_scheme(const std::string& name);

/// Populates every graph's x. Auto picks node labels when present, else degrees.
/// Node labels map to one-hot e_(label - min label); degrees to e_min(deg, cap).
/// Throws ConfigError when the scheme needs data the files did not provide.
Dataset build_features(Dataset dataset, FeatureScheme scheme,
                       std::size_t degree_cap = kDefaultDegreeCap);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // graph index -> fold id
  std::vector<std::string> warnings;

  std::vector<std::size_t> fold(std::size_t fold_id) const;
  std::string to_json() const;
  static FoldPlan from_json(const std::string& text);
};

/// Stratified k-fold assignment. Each class is shuffled and dealt round-robin,
/// continuing the fold cursor across classes so fold sizes differ by at most one.
/// Classes with fewer than k members are pooled and dealt unstratified (with a warning).
FoldPlan stratified_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed);

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// Test = fold `fold_id`; validation = a stratified `val_fraction` of the rest.
FoldSplit make_split(const FoldPlan& plan, const Dataset& dataset, std::size_t fold_id,
                     double val_fraction, std::uint64_t seed);

/// Shuffled mini-batches over `indices`; the last batch may be short.
std::vector<std::vector<std::size_t>> batches(std::span<const std::size_t> indices,
                                              std::size_t batch_size, std::uint64_t seed);

/// G(n, p): every unordered pair independently with probability `density`.
/// Features are the constant 1 (n x 1), label 0.
Graph erdos_renyi(std::size_t n, double density, std::uint64_t seed);

}  // namespace gtpool
