// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major float64 tensors that record a reverse-mode differentiation
// graph as operations are applied to them.

#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace graphfuse {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // empty until first accumulation
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads `self.grad` and accumulates into the parents' grads.
  std::function<void(Node& self)> backward;

  std::vector<double>& ensure_grad();
};

}  // namespace detail

class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> data, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t dim(std::size_t axis) const { return node_->shape.at(axis); }
  std::size_t numel() const { return node_->data.size(); }

  std::span<const double> data() const { return node_->data; }
  // Direct write access; intended for leaves (parameters, inputs).
  std::span<double> mutable_data() { return node_->data; }
  double item() const;
  double operator[](std::size_t flat) const { return node_->data[flat]; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Gradient buffer, allocated (zero) on demand.
  std::span<double> grad();
  std::span<const double> grad() const;
  void zero_grad();

  /// Populates d(this)/d(leaf) into every reachable leaf that requires
  /// grad. Leaf gradients accumulate across calls; interior buffers are
  /// recomputed. `this` must hold exactly one element.
  void backward() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }

  /// Builds an op result. If gradient recording is disabled or no parent
  /// requires grad, the backward closure and parent links are dropped.
  static Tensor make_result(Shape shape, std::vector<double> data,
                            std::initializer_list<Tensor> parents,
                            std::function<void(detail::Node&)> backward);

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::Node> node_;
};

bool grad_enabled();

/// Asks the C allocator to keep large freed blocks for reuse instead of
/// unmapping them. Training frees and reallocates same-sized buffers every
/// step, so this removes most page-fault overhead. No-op off glibc.
void tune_allocator();

/// Disables graph recording on this thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

}  // namespace graphfuse
