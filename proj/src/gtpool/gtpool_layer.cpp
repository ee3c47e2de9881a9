#include "gtpool/gtpool_layer.hpp"

#include <cmath>

#include "gtpool/errors.hpp"
#include "gtpool/gnn.hpp"
#include "gtpool/ops.hpp"
#include "gtpool/rng.hpp"

namespace gtpool {
namespace {

Tensor param(std::size_t fan_in, std::size_t rows, std::size_t cols, Rng& rng) {
  return Tensor::parameter(init_uniform(fan_in, rows, cols, rng));
}

void check_forced(std::span<const std::size_t> idx, std::size_t n) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= n) throw IndexError("pool: forced index " + std::to_string(idx[i]) + " out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) throw ArgumentError("pool: forced indices must be strictly ascending");
  }
}

}  // namespace

GtPoolLayer::GtPoolLayer(const GtPoolConfig& config, Rng& rng) : config_(config) {
  const std::size_t d = config.dim;
  if (config.heads == 0 || d == 0 || d % config.heads != 0) {
    throw ConfigError("hidden dimension " + std::to_string(d) + " is not divisible by " +
                      std::to_string(config.heads) + " heads");
  }
  if (!(config.lambda >= 0.0 && config.lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  const std::size_t dh = head_dim();
  for (std::size_t h = 0; h < config.heads; ++h) {
    wq.push_back(param(d, d, dh, rng));
    wk.push_back(param(d, d, dh, rng));
    wv.push_back(param(d, d, dh, rng));
    theta_g.push_back(param(dh, dh, 1, rng));
    theta_l.push_back(param(dh, dh, 1, rng));
  }
  w_o = param(d, d, d, rng);
  ffn_w1 = param(d, d, 2 * d, rng);
  ffn_b1 = param(d, 1, 2 * d, rng);
  ffn_w2 = param(2 * d, 2 * d, d, rng);
  ffn_b2 = param(2 * d, 1, d, rng);
  ln_gain = Tensor::parameter(Matrix(1, d, 1.0));
  ln_bias = Tensor::parameter(Matrix(1, d, 0.0));
}

Attention GtPoolLayer::attention(const Tensor& x) const {
  if (x.cols() != config_.dim) {
    throw DimensionError("GtPoolLayer: input " + x.value().shape_str() + " for dim " + std::to_string(config_.dim));
  }
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim()));
  Attention att;
  for (std::size_t h = 0; h < config_.heads; ++h) {
    const Tensor q = ops::matmul(x, wq[h]);
    const Tensor k = ops::matmul(x, wk[h]);
    att.a.push_back(ops::row_softmax(ops::scale(ops::matmul_nt(q, k), inv_sqrt)));
    att.v.push_back(ops::matmul(x, wv[h]));
  }
  return att;
}

Tensor GtPoolLayer::score(const Attention& att, const Matrix& mask) const {
  const double lambda = config_.lambda;
  const Tensor mask_t = Tensor::constant(mask);
  Tensor total;
  for (std::size_t h = 0; h < att.a.size(); ++h) {
    Tensor s;
    if (lambda > 0.0) {
      s = ops::scale(ops::tanh(ops::matmul(att.a[h], ops::matmul(att.v[h], theta_g[h]))), lambda);
    }
    if (lambda < 1.0) {
      const Tensor masked = ops::hadamard(att.a[h], mask_t);
      const Tensor local = ops::scale(ops::tanh(ops::matmul(masked, ops::matmul(att.v[h], theta_l[h]))), 1.0 - lambda);
      s = s.defined() ? ops::add(s, local) : local;
    }
    total = total.defined() ? ops::add(total, s) : s;
  }
  return ops::row_softmax(ops::transpose(total));
}

PoolResult GtPoolLayer::pool(const Tensor& x, const Graph& graph, bool train, Rng& rng,
                             std::span<const std::size_t> forced_idx) const {
  if (graph.n == 0) throw ArgumentError("pool: empty graph");
  if (x.rows() != graph.n) {
    throw DimensionError("pool: features " + x.value().shape_str() + " for a graph of " + std::to_string(graph.n) + " nodes");
  }
  const Attention att = attention(x);
  PoolResult out;
  out.score = score(att, graph.dense_adjacency(true));
  out.scores = sampler::ScoreDistribution::from_probabilities(out.score.value().data);
  if (forced_idx.empty()) {
    out.idx = sampler::select(out.scores, config_.spec);
  } else {
    check_forced(forced_idx, graph.n);
    out.idx.assign(forced_idx.begin(), forced_idx.end());
  }
  out.graph = graph.induced(out.idx);

  std::vector<Tensor> heads;
  for (std::size_t h = 0; h < config_.heads; ++h) {
    out.refined_attention.push_back(ops::gather_rows(att.a[h], out.idx));
    heads.push_back(ops::matmul(out.refined_attention.back(), att.v[h]));
  }
  Tensor mixed = ops::matmul(heads.size() == 1 ? heads.front() : ops::concat_cols(heads), w_o);
  if (config_.score_gating) {
    const Tensor s_idx = ops::gather_rows(ops::transpose(out.score), out.idx);
    mixed = ops::mul_rows(mixed, ops::scale(s_idx, static_cast<double>(graph.n)));
  }
  mixed = ops::dropout(mixed, config_.dropout, rng, train);
  const Tensor x_hat = ops::add(mixed, ops::gather_rows(x, out.idx));

  Tensor f = ops::layer_norm(x_hat, ln_gain, ln_bias);
  f = ops::gelu(ops::add_row(ops::matmul(f, ffn_w1), ffn_b1));
  f = ops::dropout(f, config_.dropout, rng, train);
  f = ops::add_row(ops::matmul(f, ffn_w2), ffn_b2);
  out.x_prime = ops::add(f, x_hat);
  return out;
}

std::vector<std::pair<std::string, Tensor>> GtPoolLayer::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  for (std::size_t h = 0; h < wq.size(); ++h) {
    const std::string p = "head" + std::to_string(h) + ".";
    out.emplace_back(p + "wq", wq[h]);
    out.emplace_back(p + "wk", wk[h]);
    out.emplace_back(p + "wv", wv[h]);
    out.emplace_back(p + "theta_g", theta_g[h]);
    out.emplace_back(p + "theta_l", theta_l[h]);
  }
  out.emplace_back("w_o", w_o);
  out.emplace_back("ffn_w1", ffn_w1);
  out.emplace_back("ffn_b1", ffn_b1);
  out.emplace_back("ffn_w2", ffn_w2);
  out.emplace_back("ffn_b2", ffn_b2);
  out.emplace_back("ln_gain", ln_gain);
  out.emplace_back("ln_bias", ln_bias);
  return out;
}

}  // namespace gtpool
