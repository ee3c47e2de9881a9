#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gtpool/gnn.hpp"
#include "gtpool/graph.hpp"
#include "gtpool/gtpool_layer.hpp"
#include "gtpool/tensor.hpp"

namespace gtpool {

class Rng;

struct ModelConfig {
  std::size_t input_dim = 1;
  std::size_t hidden = 64;
  std::size_t heads = 4;
  std::size_t layers = 3;
  std::size_t num_classes = 2;
  double lambda = 0.5;
  sampler::SampleSpec spec;
  double dropout = 0.0;
  bool score_gating = false;
};

struct Block {
  GcnLayer gcn;
  GtPoolLayer pool;
};

struct ForwardResult {
  Tensor logits;
  /// Indices kept by each block, relative to that block's input graph.
  std::vector<std::vector<std::size_t>> kept;
  /// Node count after each block.
  std::vector<std::size_t> sizes;
};

/// embed -> l x (GCN -> GTPool) -> sum of per-block readouts -> 2d -> d -> C MLP.
class GtPoolNet {
public:
  /// Throws ConfigError on an invalid configuration.
  GtPoolNet(const ModelConfig& config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// `forced` optionally fixes every block's selection (one ascending index list per block).
  ForwardResult forward(const Graph& graph, bool train, Rng& rng,
                        const std::vector<std::vector<std::size_t>>* forced = nullptr) const;

  std::vector<std::pair<std::string, Tensor>> named_parameters() const;
  std::vector<Tensor> parameters() const;
  std::size_t count_parameters() const;

  /// Deep copies of every parameter value, in named_parameters() order.
  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

  Tensor embed_w, embed_b;
  std::vector<Block> blocks;
  Tensor head_w1, head_b1, head_w2, head_b2;

private:
  ModelConfig config_;
};

/// Closed-form parameter count for a configuration.
std::size_t expected_parameter_count(const ModelConfig& config);

/// Checkpoint layout (little-endian):
///   "GTPCKPT\0"  u32 version (1)  u32 entry count
///   per entry: u32 name length, name bytes, u32 rows, u32 cols, rows*cols f64
void save_checkpoint(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, Matrix>>& entries);
std::vector<std::pair<std::string, Matrix>> load_checkpoint(const std::filesystem::path& path);

void save_model(const GtPoolNet& net, const std::filesystem::path& path);
/// Loads values by name into `net`. Throws FormatError on a missing name or shape mismatch.
void load_model(GtPoolNet& net, const std::filesystem::path& path);

}  // namespace gtpool
