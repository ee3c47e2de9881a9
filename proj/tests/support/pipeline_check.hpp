#pragma once

#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "gtpool/gnn.hpp"
#include "gtpool/gtpool_layer.hpp"
#include "gtpool/model.hpp"

namespace gtpool::testing {

inline GradCheck gcn_grad_check(std::uint64_t seed) {
  Rng rng(seed);
  const Graph g = random_graph(7, 0.4, 4, rng);
  GcnLayer layer(4, 5, rng);
  Tensor x = Tensor::parameter(g.x);
  const Matrix adj = g.gcn_normalized_adjacency();
  return grad_check([=] { return gcn_forward(layer, x, adj); }, {x, layer.w}, seed + 1);
}

/// pool() with the selection frozen to what the sampler picked on the first pass.
inline GradCheck pool_grad_check(std::uint64_t seed, bool gating = false) {
  Rng rng(seed);
  const Graph g = random_graph(6, 0.5, 8, rng);
  GtPoolConfig pc;
  pc.dim = 8;
  pc.heads = 2;
  pc.lambda = 0.3;
  pc.spec = {0.5, sampler::Method::RWSV};
  pc.score_gating = gating;
  GtPoolLayer layer(pc, rng);
  Tensor x = Tensor::parameter(g.x);
  std::vector<std::size_t> idx;
  {
    NoGradGuard guard;
    Rng r(0);
    idx = layer.pool(x, g, false, r).idx;
  }
  std::vector<Tensor> inputs = {x};
  for (auto& [name, t] : layer.named_parameters()) inputs.push_back(t);
  return grad_check([=] {
    Rng r(0);
    return layer.pool(x, g, false, r, idx).x_prime;
  }, inputs, seed + 1);
}

/// embed -> GCN -> GTPool -> readout -> head -> cross-entropy with every block's selection frozen.
inline GradCheck model_grad_check(std::uint64_t seed, bool gating = false) {
  Rng rng(seed);
  Graph g = random_graph(6, 0.5, 3, rng);
  g.label = rng.below(2);
  ModelConfig mc;
  mc.input_dim = 3;
  mc.hidden = 8;
  mc.heads = 2;
  mc.layers = 2;
  mc.num_classes = 2;
  mc.lambda = 0.4;
  mc.spec = {0.5, sampler::Method::RWSV};
  mc.score_gating = gating;
  GtPoolNet net(mc, seed);
  std::vector<std::vector<std::size_t>> kept;
  {
    NoGradGuard guard;
    Rng r(0);
    kept = net.forward(g, false, r).kept;
  }
  const std::size_t label[] = {g.label};
  return grad_check([&] {
    Rng r(0);
    return ops::cross_entropy(net.forward(g, false, r, &kept).logits, label);
  }, net.parameters(), seed + 1);
}

}  // namespace gtpool::testing
