// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/tensor.hpp"

#include <algorithm>
#include <unordered_set>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

std::vector<double>& detail::Node::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  return grad;
}

Tensor::Tensor(Shape shape, std::vector<double> data, bool requires_grad) {
  if (graphfuse::numel(shape) != data.size()) {
    throw DimensionError("tensor data has " + std::to_string(data.size()) +
                         " values but shape " + shape_str(shape) + " needs " +
                         std::to_string(graphfuse::numel(shape)));
  }
  node_ = std::make_shared<detail::Node>();
  node_->shape = std::move(shape);
  node_->data = std::move(data);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = graphfuse::numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(Shape{}, {value}, requires_grad);
}

double Tensor::item() const {
  if (numel() != 1) {
    throw ContractError("item() on tensor of shape " + shape_str(shape()));
  }
  return node_->data[0];
}

std::span<double> Tensor::grad() { return node_->ensure_grad(); }

std::span<const double> Tensor::grad() const { return node_->ensure_grad(); }

void Tensor::zero_grad() {
  std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
}

Tensor Tensor::make_result(Shape shape, std::vector<double> data,
                           std::initializer_list<Tensor> parents,
                           std::function<void(detail::Node&)> backward) {
  Tensor out(std::move(shape), std::move(data));
  if (!g_grad_enabled) return out;
  const bool any = std::any_of(parents.begin(), parents.end(), [](const Tensor& p) {
    return p.defined() && p.requires_grad();
  });
  if (!any) return out;
  out.node_->requires_grad = true;
  for (const Tensor& p : parents) out.node_->parents.push_back(p.node_);
  out.node_->backward = std::move(backward);
  return out;
}

void Tensor::backward() const {
  if (numel() != 1) {
    throw ContractError("backward() requires a scalar loss, got shape " +
                        shape_str(shape()));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order with each node once.
  std::vector<detail::Node*> order;
  std::unordered_set<detail::Node*> visited;
  std::vector<std::pair<detail::Node*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      detail::Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (detail::Node* n : order) {
    if (n->backward) n->grad.assign(n->data.size(), 0.0);
  }
  node_->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward) (*it)->backward(**it);
  }
}

bool grad_enabled() { return g_grad_enabled; }

void tune_allocator() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }

NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

}  // namespace graphfuse
