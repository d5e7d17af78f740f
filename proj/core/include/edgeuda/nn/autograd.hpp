#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "edgeuda/tensor.hpp"

namespace edgeuda::nn {

struct Node {
  Tensor value;
  Tensor grad;  // allocated on first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  // Reads this node's grad and accumulates into the inputs' grads.
  std::function<void(Node&)> backprop;

  Tensor& grad_buffer();
};

// Handle to a node of a dynamically built computation graph. A graph is
// owned by the handles that reach it and is not shared across threads.
class Var {
 public:
  Var() = default;

  static Var constant(Tensor value);
  static Var parameter(Tensor value);

  // Builds an op node. `backprop` is only kept when some input needs grad.
  static Var make(Tensor value, std::vector<Var> inputs, std::function<void(Node&)> backprop);

  const Tensor& value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }
  bool requires_grad() const { return node_ && node_->requires_grad; }
  // Zero-filled when no gradient reached this node.
  Tensor grad() const;
  Var detach() const { return constant(node_->value); }
  bool defined() const noexcept { return static_cast<bool>(node_); }

  Node& node() const { return *node_; }

 private:
  std::shared_ptr<Node> node_;
};

// Seeds d(root)/d(root) = 1 for a single-element root and propagates
// through every node reachable from it.
void backward(const Var& root);

}  // namespace edgeuda::nn
