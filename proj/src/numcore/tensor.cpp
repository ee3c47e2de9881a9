#include <unordered_set>

#include "gtpool/errors.hpp"
#include "numcore/node.hpp"

namespace gtpool {
namespace {

thread_local bool t_grad_enabled = true;

detail::Node& deref(const std::shared_ptr<detail::Node>& n) {
  if (!n) throw ArgumentError("use of an undefined Tensor");
  return *n;
}

// Reverse topological order of the nodes reachable from root that need a gradient.
std::vector<detail::Node*> topo_order(detail::Node* root) {
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(root, 0);
  visited.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  return order;  // post-order: parents before children
}

}  // namespace

Tensor Tensor::constant(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  return Tensor(std::move(n));
}

Tensor Tensor::parameter(Matrix value) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  n->ensure_grad();
  return Tensor(std::move(n));
}

std::size_t Tensor::rows() const { return deref(node_).value.rows; }
std::size_t Tensor::cols() const { return deref(node_).value.cols; }
const Matrix& Tensor::value() const { return deref(node_).value; }
Matrix& Tensor::mutable_value() { return deref(node_).value; }
const Matrix& Tensor::grad() const { return deref(node_).grad; }
Matrix& Tensor::mutable_grad() { return deref(node_).ensure_grad(); }
bool Tensor::requires_grad() const { return deref(node_).requires_grad; }

double Tensor::item() const {
  const Matrix& v = value();
  if (v.rows != 1 || v.cols != 1) throw DimensionError("item() on a " + v.shape_str() + " tensor");
  return v.data[0];
}

void Tensor::backward() {
  detail::Node& root = deref(node_);
  if (!root.requires_grad) return;
  std::vector<detail::Node*> order = topo_order(&root);
  for (detail::Node* n : order) n->ensure_grad();
  root.grad.fill(1.0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::Node* n = *it;
    if (n->backward) n->backward(*n);
  }
  // Release the tape; leaves keep their accumulated gradient.
  for (detail::Node* n : order) {
    if (n->backward) {
      n->backward = nullptr;
      n->parents.clear();
      n->grad = Matrix();
    }
  }
}

void Tensor::zero_grad() {
  detail::Node& n = deref(node_);
  if (n.requires_grad) n.ensure_grad().fill(0.0);
}

bool grad_enabled() { return t_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(t_grad_enabled) { t_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { t_grad_enabled = previous_; }

Tensor make_op(Matrix value, std::vector<Tensor> inputs, std::function<void(detail::Node&)> fn) {
  auto n = std::make_shared<detail::Node>();
  n->value = std::move(value);
  bool needs = false;
  if (t_grad_enabled) {
    for (const Tensor& t : inputs) needs = needs || deref(TensorAccess::node(t)).requires_grad;
  }
#ifndef NDEBUG
  bool inputs_finite = true;
  for (const Tensor& t : inputs) inputs_finite = inputs_finite && t.value().all_finite();
  if (inputs_finite && !n->value.all_finite()) {
    throw NumericError("op produced non-finite values from finite inputs");
  }
#endif
  if (needs) {
    n->requires_grad = true;
    n->parents.reserve(inputs.size());
    for (Tensor& t : inputs) n->parents.push_back(TensorAccess::node(t));
    n->backward = std::move(fn);
  }
  return TensorAccess::wrap(std::move(n));
}

}  // namespace gtpool
