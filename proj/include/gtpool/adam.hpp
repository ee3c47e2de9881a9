#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gtpool/matrix.hpp"
#include "gtpool/tensor.hpp"

namespace gtpool {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // Coupled L2: weight_decay * param is added to the gradient before the moments.
  double weight_decay = 0.0;
};

struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::uint64_t step = 0;
};

/// One bias-corrected Adam update of `params` in place. Moments are created on
/// the first call. Throws NumericError before touching anything if a gradient
/// is non-finite, and DimensionError if shapes disagree.
void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state, const AdamConfig& config);

/// Adam over a fixed list of parameter tensors.
class Adam {
public:
  Adam(std::vector<Tensor> params, AdamConfig config);

  void zero_grad();
  void step();

  const AdamState& state() const { return state_; }
  const AdamConfig& config() const { return config_; }

private:
  std::vector<Tensor> params_;
  AdamConfig config_;
  AdamState state_;
};

}  // namespace gtpool
