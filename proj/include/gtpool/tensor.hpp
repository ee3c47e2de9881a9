#pragma once

#include <memory>

#include "gtpool/matrix.hpp"

namespace gtpool {

namespace detail {
struct Node;
}

/// Handle to a node of the reverse-mode computation graph.
///
/// Copies share the node. Ops record their inputs and a backward closure while
/// gradient recording is enabled; `backward()` replays the recorded tape in
/// reverse topological order, accumulates into every reachable tensor that
/// requires a gradient, and then releases the tape so intermediates are freed.
/// Parameters are leaves created with `parameter()`; their gradients persist
/// and accumulate until `zero_grad()`.
///
/// A tensor and its tape are single-threaded values. Parameters may be read
/// concurrently by forward passes, but only one backward at a time may
/// accumulate into them.
class Tensor {
public:
  Tensor() = default;

  static Tensor constant(Matrix value);
  static Tensor parameter(Matrix value);

  bool defined() const { return node_ != nullptr; }
  std::size_t rows() const;
  std::size_t cols() const;

  const Matrix& value() const;
  Matrix& mutable_value();
  /// Gradient buffer; empty unless requires_grad() and a backward has run (leaves: always sized).
  const Matrix& grad() const;
  Matrix& mutable_grad();
  bool requires_grad() const;

  /// Value of a 1x1 tensor.
  double item() const;

  /// Seeds d(self)/d(self) = 1 (every entry) and propagates to all ancestors.
  void backward();
  void zero_grad();

  const detail::Node* node() const { return node_.get(); }

private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;

  friend struct TensorAccess;
};

/// True unless a NoGradGuard is alive on this thread.
bool grad_enabled();

/// Disables tape recording on the current thread for its lifetime.
class NoGradGuard {
public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

private:
  bool previous_;
};

}  // namespace gtpool
