#pragma once

#include <cstddef>

#include "gtpool/graph.hpp"
#include "gtpool/tensor.hpp"

namespace gtpool {

class Rng;

/// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) initialization.
Matrix init_uniform(std::size_t fan_in, std::size_t rows, std::size_t cols, Rng& rng);

/// relu(D^-1/2 (A + I) D^-1/2 X W). No bias.
struct GcnLayer {
  Tensor w;

  GcnLayer() = default;
  GcnLayer(std::size_t d_in, std::size_t d_out, Rng& rng);
};

/// `norm_adj` is the n x n normalized adjacency (Graph::gcn_normalized_adjacency).
Tensor gcn_forward(const GcnLayer& layer, const Tensor& x, const Matrix& norm_adj);
Tensor gcn_forward(const GcnLayer& layer, const Tensor& x, const Graph& graph);

/// mean || max over rows, 1 x 2d. Throws ArgumentError on an empty input.
Tensor readout(const Tensor& x);

}  // namespace gtpool
