#include <cmath>

#include "gtpool/errors.hpp"
#include "gtpool/gnn.hpp"
#include "gtpool/ops.hpp"
#include "gtpool/rng.hpp"

namespace gtpool {

Matrix init_uniform(std::size_t fan_in, std::size_t rows, std::size_t cols, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  Matrix m(rows, cols);
  for (double& v : m.data) v = rng.uniform(-bound, bound);
  return m;
}

GcnLayer::GcnLayer(std::size_t d_in, std::size_t d_out, Rng& rng)
    : w(Tensor::parameter(init_uniform(d_in, d_in, d_out, rng))) {}

Tensor gcn_forward(const GcnLayer& layer, const Tensor& x, const Matrix& norm_adj) {
  if (norm_adj.rows != x.rows() || norm_adj.cols != x.rows()) {
    throw DimensionError("gcn_forward: adjacency " + norm_adj.shape_str() + " for features " +
                         x.value().shape_str());
  }
  const Tensor xw = ops::matmul(x, layer.w);
  return ops::relu(ops::matmul(Tensor::constant(norm_adj), xw));
}

Tensor gcn_forward(const GcnLayer& layer, const Tensor& x, const Graph& graph) {
  return gcn_forward(layer, x, graph.gcn_normalized_adjacency());
}

Tensor readout(const Tensor& x) {
  if (x.rows() == 0) throw ArgumentError("readout: empty graph");
  const Tensor parts[] = {ops::mean_rows(x), ops::max_rows(x)};
  return ops::concat_cols(parts);
}

}  // namespace gtpool
