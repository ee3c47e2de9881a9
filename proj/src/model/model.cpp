#include "gtpool/model.hpp"

#include "gtpool/errors.hpp"
#include "gtpool/ops.hpp"
#include "gtpool/rng.hpp"

namespace gtpool {
namespace {

Tensor param(std::size_t fan_in, std::size_t rows, std::size_t cols, Rng& rng) {
  return Tensor::parameter(init_uniform(fan_in, rows, cols, rng));
}

void validate(const ModelConfig& c) {
  if (c.input_dim == 0) throw ConfigError("input dimension must be > 0");
  if (c.hidden == 0) throw ConfigError("hidden must be > 0");
  if (c.layers < 1) throw ConfigError("layers must be >= 1");
  if (c.num_classes < 2) throw ConfigError("need at least 2 classes");
  if (c.heads == 0 || c.hidden % c.heads != 0) {
    throw ConfigError("hidden " + std::to_string(c.hidden) + " is not divisible by heads " + std::to_string(c.heads));
  }
  if (!(c.spec.mu > 0.0 && c.spec.mu <= 1.0)) throw ConfigError("mu must be in (0, 1]");
  if (!(c.lambda >= 0.0 && c.lambda <= 1.0)) throw ConfigError("lambda must be in [0, 1]");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
}

}  // namespace

GtPoolNet::GtPoolNet(const ModelConfig& config, std::uint64_t seed) : config_(config) {
  validate(config);
  Rng rng(seed);
  const std::size_t d = config.hidden;
  embed_w = param(config.input_dim, config.input_dim, d, rng);
  embed_b = param(config.input_dim, 1, d, rng);
  GtPoolConfig pc;
  pc.dim = d;
  pc.heads = config.heads;
  pc.lambda = config.lambda;
  pc.spec = config.spec;
  pc.dropout = config.dropout;
  pc.score_gating = config.score_gating;
  for (std::size_t l = 0; l < config.layers; ++l) {
    Block b;
    b.gcn = GcnLayer(d, d, rng);
    b.pool = GtPoolLayer(pc, rng);
    blocks.push_back(std::move(b));
  }
  head_w1 = param(2 * d, 2 * d, d, rng);
  head_b1 = param(2 * d, 1, d, rng);
  head_w2 = param(d, d, config.num_classes, rng);
  head_b2 = param(d, 1, config.num_classes, rng);
}

ForwardResult GtPoolNet::forward(const Graph& graph, bool train, Rng& rng,
                                 const std::vector<std::vector<std::size_t>>* forced) const {
  if (graph.n == 0) throw ArgumentError("forward: empty graph");
  if (graph.x.rows != graph.n || graph.x.cols != config_.input_dim) {
    throw DimensionError("forward: features " + graph.x.shape_str() + " for " + std::to_string(graph.n) +
                         " nodes and input dim " + std::to_string(config_.input_dim));
  }
  if (forced != nullptr && forced->size() != blocks.size()) {
    throw ArgumentError("forward: forced selection needs one index list per block");
  }
  ForwardResult out;
  Tensor x = ops::add_row(ops::matmul(Tensor::constant(graph.x), embed_w), embed_b);
  Graph current = graph;
  Tensor h_g;
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const Tensor conv = gcn_forward(blocks[l].gcn, x, current);
    std::span<const std::size_t> fixed;
    if (forced != nullptr) fixed = (*forced)[l];
    PoolResult pooled = blocks[l].pool.pool(conv, current, train, rng, fixed);
    x = pooled.x_prime;
    const Tensor r = readout(x);
    h_g = h_g.defined() ? ops::add(h_g, r) : r;
    out.sizes.push_back(pooled.idx.size());
    out.kept.push_back(std::move(pooled.idx));
    current = std::move(pooled.graph);
  }
  Tensor h = ops::relu(ops::add_row(ops::matmul(h_g, head_w1), head_b1));
  h = ops::dropout(h, config_.dropout, rng, train);
  out.logits = ops::add_row(ops::matmul(h, head_w2), head_b2);
  return out;
}

std::vector<std::pair<std::string, Tensor>> GtPoolNet::named_parameters() const {
  std::vector<std::pair<std::string, Tensor>> out;
  out.emplace_back("embed.w", embed_w);
  out.emplace_back("embed.b", embed_b);
  for (std::size_t l = 0; l < blocks.size(); ++l) {
    const std::string p = "block" + std::to_string(l) + ".";
    out.emplace_back(p + "gcn.w", blocks[l].gcn.w);
    for (auto& [name, t] : blocks[l].pool.named_parameters()) out.emplace_back(p + "pool." + name, t);
  }
  out.emplace_back("head.w1", head_w1);
  out.emplace_back("head.b1", head_b1);
  out.emplace_back("head.w2", head_w2);
  out.emplace_back("head.b2", head_b2);
  return out;
}

std::vector<Tensor> GtPoolNet::parameters() const {
  std::vector<Tensor> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t);
  return out;
}

std::size_t GtPoolNet::count_parameters() const {
  std::size_t total = 0;
  for (auto& [name, t] : named_parameters()) total += t.value().size();
  return total;
}

std::vector<Matrix> GtPoolNet::snapshot() const {
  std::vector<Matrix> out;
  for (auto& [name, t] : named_parameters()) out.push_back(t.value());
  return out;
}

void GtPoolNet::restore(const std::vector<Matrix>& values) {
  auto params = named_parameters();
  if (values.size() != params.size()) throw ArgumentError("restore: snapshot has the wrong number of entries");
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& dst = params[i].second.mutable_value();
    if (!dst.same_shape(values[i])) {
      throw DimensionError("restore: " + params[i].first + " is " + dst.shape_str() + ", snapshot " + values[i].shape_str());
    }
    dst = values[i];
  }
}

std::size_t expected_parameter_count(const ModelConfig& c) {
  const std::size_t d = c.hidden;
  const std::size_t dh = d / c.heads;
  const std::size_t embed = c.input_dim * d + d;
  const std::size_t gcn = d * d;
  const std::size_t attention = c.heads * (3 * d * dh + 2 * dh) + d * d;
  const std::size_t ffn = d * 2 * d + 2 * d + 2 * d * d + d;
  const std::size_t norm = 2 * d;
  const std::size_t head = 2 * d * d + d + d * c.num_classes + c.num_classes;
  return embed + c.layers * (gcn + attention + ffn + norm) + head;
}

}  // namespace gtpool
