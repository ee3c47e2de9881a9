#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gtpool/tensor.hpp"

namespace gtpool {

namespace detail {

struct Node {
  Matrix value;
  Matrix grad;
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this->grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward;

  Matrix& ensure_grad() {
    if (grad.empty() && !value.empty()) grad = Matrix(value.rows, value.cols);
    if (grad.rows != value.rows || grad.cols != value.cols) grad = Matrix(value.rows, value.cols);
    return grad;
  }
};

}  // namespace detail

struct TensorAccess {
  static const std::shared_ptr<detail::Node>& node(const Tensor& t) { return t.node_; }
  static Tensor wrap(std::shared_ptr<detail::Node> n) { return Tensor(std::move(n)); }
};

/// Creates the output node of an op. When recording is on and any input needs
/// a gradient, the node keeps its inputs and the closure; otherwise both are dropped.
Tensor make_op(Matrix value, std::vector<Tensor> inputs, std::function<void(detail::Node&)> fn);

}  // namespace gtpool
