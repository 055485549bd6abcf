// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "graphfuse/rng.hpp"
#include "graphfuse/tensor.hpp"

namespace graphfuse {

struct Parameter {
  std::string name;
  Tensor value;
  bool decay = true;  // false for biases and layer-norm gains/biases
};

/// Ordered registry of named trainable tensors. Modules keep Tensor handles
/// into the store, so writes through the store are visible to them.
class ParamStore {
 public:
  Tensor add(std::string name, Tensor value, bool decay = true);

  /// Xavier/Glorot uniform matrix (fan_in x fan_out).
  Tensor add_xavier(std::string name, std::size_t fan_in, std::size_t fan_out, Rng& rng);
  Tensor add_normal(std::string name, Shape shape, double stddev, Rng& rng);
  Tensor add_constant(std::string name, Shape shape, double value, bool decay);

  const std::vector<Parameter>& params() const { return params_; }
  std::vector<Parameter>& params() { return params_; }
  const Parameter* find(const std::string& name) const;
  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

 private:
  std::vector<Parameter> params_;
};

/// y = x W + b, W stored (in x out).
struct Linear {
  Linear() = default;
  Linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const;

  Tensor weight;
  Tensor bias;
};

struct LayerNorm {
  LayerNorm() = default;
  LayerNorm(ParamStore& store, const std::string& prefix, std::size_t width);
  Tensor operator()(const Tensor& x) const;

  Tensor gain;
  Tensor bias;
  double eps = 1e-5;
};

}  // namespace graphfuse
