#include "gtpool/errors.hpp"
#include "gtpool/graph.hpp"
#include "gtpool/rng.hpp"

namespace gtpool {

Graph erdos_renyi(std::size_t n, double density, std::uint64_t seed) {
  if (n < 2) throw ArgumentError("erdos_renyi: n must be >= 2");
  if (!(density > 0.0 && density <= 1.0)) throw ArgumentError("erdos_renyi: density must be in (0, 1]");
  Rng rng(seed);
  Graph g;
  g.n = n;
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (density >= 1.0 || rng.bernoulli(density)) {
        g.edges.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v)});
      }
    }
  }
  g.x = Matrix(n, 1, 1.0);
  g.label = 0;
  return g;
}

}  // namespace gtpool
