#include "gtpool/adam.hpp"

#include <cmath>
#include <string>

#include "gtpool/errors.hpp"

namespace gtpool {

void adam_step(std::span<Matrix* const> params, std::span<const Matrix* const> grads,
               AdamState& state, const AdamConfig& config) {
  if (params.size() != grads.size()) throw DimensionError("adam_step: params/grads count differ");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i])) {
      throw DimensionError("adam_step: parameter " + std::to_string(i) + " is " +
                           params[i]->shape_str() + " but its gradient is " +
                           grads[i]->shape_str());
    }
    if (!grads[i]->all_finite()) {
      throw NumericError("adam_step: non-finite gradient for parameter " + std::to_string(i) +
                         "; step aborted");
    }
  }
  if (state.m.empty()) {
    for (const Matrix* p : params) {
      state.m.emplace_back(p->rows, p->cols);
      state.v.emplace_back(p->rows, p->cols);
    }
  }
  if (state.m.size() != params.size()) throw DimensionError("adam_step: state/params count differ");

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bc1 = 1.0 - std::pow(config.beta1, t);
  const double bc2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = *grads[i];
    Matrix& m = state.m[i];
    Matrix& v = state.v[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g.data[j] + config.weight_decay * p.data[j];
      m.data[j] = config.beta1 * m.data[j] + (1.0 - config.beta1) * gj;
      v.data[j] = config.beta2 * v.data[j] + (1.0 - config.beta2) * gj * gj;
      const double mhat = m.data[j] / bc1;
      const double vhat = v.data[j] / bc2;
      p.data[j] -= config.lr * mhat / (std::sqrt(vhat) + config.eps);
    }
  }
}

Adam::Adam(std::vector<Tensor> params, AdamConfig config)
    : params_(std::move(params)), config_(config) {}

void Adam::zero_grad() {
  for (Tensor& p : params_) p.zero_grad();
}

void Adam::step() {
  std::vector<Matrix*> values;
  std::vector<const Matrix*> grads;
  values.reserve(params_.size());
  grads.reserve(params_.size());
  for (Tensor& p : params_) {
    values.push_back(&p.mutable_value());
    grads.push_back(&p.mutable_grad());
  }
  adam_step(values, grads, state_, config_);
}

}  // namespace gtpool
