// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/params.hpp"

#include <cmath>

#include "graphfuse/errors.hpp"
#include "graphfuse/ops.hpp"

namespace graphfuse {

Tensor ParamStore::add(std::string name, Tensor value, bool decay) {
  if (find(name) != nullptr) throw ContractError("duplicate parameter name: " + name);
  if (!value.requires_grad()) value = Tensor(value.shape(), {value.data().begin(), value.data().end()}, true);
  params_.push_back({std::move(name), value, decay});
  return value;
}

Tensor ParamStore::add_xavier(std::string name, std::size_t fan_in, std::size_t fan_out,
                              Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> data(fan_in * fan_out);
  for (double& v : data) v = (2.0 * rng.uniform() - 1.0) * bound;
  return add(std::move(name), Tensor({fan_in, fan_out}, std::move(data), true));
}

Tensor ParamStore::add_normal(std::string name, Shape shape, double stddev, Rng& rng) {
  std::vector<double> data(numel(shape));
  for (double& v : data) v = rng.normal() * stddev;
  return add(std::move(name), Tensor(std::move(shape), std::move(data), true));
}

Tensor ParamStore::add_constant(std::string name, Shape shape, double value, bool decay) {
  return add(std::move(name), Tensor::full(std::move(shape), value, true), decay);
}

const Parameter* ParamStore::find(const std::string& name) const {
  for (const auto& p : params_)
    if (p.name == name) return &p;
  return nullptr;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& p : params_) p.value.zero_grad();
}

Linear::Linear(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
               Rng& rng)
    : weight(store.add_xavier(prefix + ".weight", in, out, rng)),
      bias(store.add_constant(prefix + ".bias", {out}, 0.0, false)) {}

Tensor Linear::operator()(const Tensor& x) const { return add(matmul(x, weight), bias); }

LayerNorm::LayerNorm(ParamStore& store, const std::string& prefix, std::size_t width)
    : gain(store.add_constant(prefix + ".gain", {width}, 1.0, false)),
      bias(store.add_constant(prefix + ".bias", {width}, 0.0, false)) {}

Tensor LayerNorm::operator()(const Tensor& x) const { return layer_norm(x, gain, bias, eps); }

}  // namespace graphfuse
