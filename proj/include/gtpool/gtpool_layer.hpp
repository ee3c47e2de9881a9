#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gtpool/graph.hpp"
#include "gtpool/sampler.hpp"
#include "gtpool/tensor.hpp"

namespace gtpool {

class Rng;

struct GtPoolConfig {
  std::size_t dim = 64;
  std::size_t heads = 4;
  /// Weight of the global score; 1 - lambda goes to the adjacency-masked local score.
  double lambda = 0.5;
  sampler::SampleSpec spec;
  double dropout = 0.0;
  /// Off by default. When set, the attention output of each kept node is scaled
  /// by n * S_i so the scoring parameters receive gradient.
  bool score_gating = false;
};

/// Per-head attention matrices A_h (n x n, row-stochastic) and values V_h (n x d_h).
struct Attention {
  std::vector<Tensor> a;
  std::vector<Tensor> v;
};

struct PoolResult {
  std::vector<std::size_t> idx;
  /// Subgraph induced by idx, relabeled 0..M-1.
  Graph graph;
  Tensor x_prime;
  /// Softmax-normalized node scores as a 1 x n tensor, and the same values as a distribution.
  Tensor score;
  sampler::ScoreDistribution scores;
  /// Rows idx of every A_h (M x n).
  std::vector<Tensor> refined_attention;

  Matrix adjacency() const { return graph.dense_adjacency(false); }
};

class GtPoolLayer {
public:
  GtPoolLayer() = default;
  /// Throws ConfigError unless dim % heads == 0 and lambda is in [0, 1].
  GtPoolLayer(const GtPoolConfig& config, Rng& rng);

  const GtPoolConfig& config() const { return config_; }
  GtPoolConfig& mutable_config() { return config_; }
  std::size_t head_dim() const { return config_.dim / config_.heads; }

  Attention attention(const Tensor& x) const;

  /// S = softmax(sum_h lambda tanh(A_h V_h tg_h) + (1 - lambda) tanh((A_h . mask) V_h tl_h)), 1 x n.
  /// `mask` is the 0/1 adjacency with self-loops.
  Tensor score(const Attention& att, const Matrix& mask) const;

  /// Scores, selects, and coarsens. A non-empty `forced_idx` (ascending, unique)
  /// replaces the sampler's choice.
  PoolResult pool(const Tensor& x, const Graph& graph, bool train, Rng& rng,
                  std::span<const std::size_t> forced_idx = {}) const;

  std::vector<std::pair<std::string, Tensor>> named_parameters() const;

  std::vector<Tensor> wq, wk, wv;
  std::vector<Tensor> theta_g, theta_l;
  Tensor w_o;
  Tensor ffn_w1, ffn_b1, ffn_w2, ffn_b2;
  Tensor ln_gain, ln_bias;

private:
  GtPoolConfig config_;
};

}  // namespace gtpool
