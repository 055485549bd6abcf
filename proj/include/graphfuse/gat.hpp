// SPDX-License-Identifier: Apache-2.0
//
// Multi-head graph attention (concat + LeakyReLU scoring). For an edge
// source j -> target i and head h:
//
//   e_ij  = leaky_relu(a_h^T [W_h x_i || W_h x_j])
//   alpha = softmax of e over the in-edges of i
//   out_i = proj(dropout(concat_h elu(sum_j alpha_ij W_h x_j)))  (+ x_i if residual)

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "graphfuse/forward.hpp"
#include "graphfuse/params.hpp"
#include "graphfuse/token_graph.hpp"

namespace graphfuse {

struct GatConfig {
  std::size_t in_dim = 64;
  std::size_t hidden = 32;  // heads * head_dim
  std::size_t heads = 4;
  double negative_slope = 0.2;
  bool residual = false;
};

class GatLayer {
 public:
  GatLayer(ParamStore& store, const std::string& prefix, const GatConfig& config, Rng& init);

  /// nodes (node_count x in_dim) -> (node_count x in_dim).
  Tensor operator()(const Tensor& nodes, const EdgeIndex& edges, ForwardContext& ctx) const;

  /// Unnormalized score of one head for the pair (target, source), computed
  /// directly from the parameters.
  double attention_logit(std::span<const double> target, std::span<const double> source,
                         std::size_t head) const;

  const GatConfig& config() const { return config_; }
  std::size_t head_dim() const { return config_.hidden / config_.heads; }

 private:
  GatConfig config_;
  Tensor weight_;      // (in_dim, hidden)
  Tensor att_target_;  // (heads, head_dim)
  Tensor att_source_;  // (heads, head_dim)
  Linear out_;         // hidden -> in_dim
};

}  // namespace graphfuse
