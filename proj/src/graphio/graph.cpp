#include <algorithm>
#include <cmath>
#include <string>

#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"

namespace gtpool {

std::vector<Edge> canonical_edges(std::size_t n,
                                  std::span<const std::pair<std::size_t, std::size_t>> pairs) {
  std::vector<Edge> out;
  out.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a >= n || b >= n) {
      throw IndexError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                       ") out of range for " + std::to_string(n) + " nodes");
    }
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    out.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : edges) {
    ++deg[e.u];
    ++deg[e.v];
  }
  return deg;
}

Matrix Graph::dense_adjacency(bool with_self_loops) const {
  Matrix a(n, n);
  for (const Edge& e : edges) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  if (with_self_loops) {
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
  }
  return a;
}

Matrix Graph::gcn_normalized_adjacency() const {
  std::vector<std::size_t> deg = degrees();
  std::vector<double> inv_sqrt(n);
  for (std::size_t i = 0; i < n; ++i) inv_sqrt[i] = 1.0 / std::sqrt(static_cast<double>(deg[i] + 1));
  Matrix a(n, n);
  for (const Edge& e : edges) {
    const double w = inv_sqrt[e.u] * inv_sqrt[e.v];
    a(e.u, e.v) = w;
    a(e.v, e.u) = w;
  }
  for (std::size_t i = 0; i < n; ++i) a(i, i) = inv_sqrt[i] * inv_sqrt[i];
  return a;
}

Graph Graph::induced(std::span<const std::size_t> idx) const {
  constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);
  std::vector<std::size_t> relabel(n, kAbsent);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) throw IndexError("induced: node " + std::to_string(idx[i]) + " out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) throw ArgumentError("induced: indices must be strictly ascending");
    relabel[idx[i]] = i;
  }
  Graph g;
  g.n = idx.size();
  g.label = label;
  for (const Edge& e : edges) {
    const std::size_t a = relabel[e.u];
    const std::size_t b = relabel[e.v];
    if (a != kAbsent && b != kAbsent) {
      g.edges.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)});
    }
  }
  // Relabeling is monotone, so (a < b) and sortedness are preserved.
  return g;
}

std::vector<std::size_t> Dataset::labels() const {
  std::vector<std::size_t> out;
  out.reserve(graphs.size());
  for (const Graph& g : graphs) out.push_back(g.label);
  return out;
}

double Dataset::mean_nodes() const {
  if (graphs.empty()) return 0.0;
  double total = 0.0;
  for (const Graph& g : graphs) total += static_cast<double>(g.n);
  return total / static_cast<double>(graphs.size());
}

}  // namespace gtpool
