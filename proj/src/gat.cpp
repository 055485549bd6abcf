// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/gat.hpp"

#include "graphfuse/errors.hpp"
#include "graphfuse/ops.hpp"

namespace graphfuse {

GatLayer::GatLayer(ParamStore& store, const std::string& prefix, const GatConfig& config,
                   Rng& init)
    : config_(config) {
  if (config.heads == 0 || config.hidden % config.heads != 0) {
    throw ConfigError("GAT hidden size " + std::to_string(config.hidden) +
                      " is not divisible by " + std::to_string(config.heads) + " heads");
  }
  if (!(config.negative_slope > 0.0 && config.negative_slope < 1.0)) {
    throw ConfigError("GAT negative slope must lie in (0, 1)");
  }
  weight_ = store.add_xavier(prefix + ".weight", config.in_dim, config.hidden, init);
  // Each head's attention vector a_h = [target half || source half].
  att_target_ = store.add_xavier(prefix + ".att_target", config.heads, head_dim(), init);
  att_source_ = store.add_xavier(prefix + ".att_source", config.heads, head_dim(), init);
  out_ = Linear(store, prefix + ".out", config.hidden, config.in_dim, init);
}

Tensor GatLayer::operator()(const Tensor& nodes, const EdgeIndex& edges,
                            ForwardContext& ctx) const {
  if (nodes.rank() != 2 || nodes.dim(0) != edges.node_count || nodes.dim(1) != config_.in_dim) {
    throw ContractError("GAT input " + shape_str(nodes.shape()) + " inconsistent with " +
                        std::to_string(edges.node_count) + " graph nodes of width " +
                        std::to_string(config_.in_dim));
  }
  const std::size_t N = edges.node_count;
  const std::size_t H = config_.heads;
  const std::size_t D = head_dim();

  Tensor z = reshape(matmul(nodes, weight_), {N, H, D});
  Tensor score_target = sum_axis(mul(z, att_target_), 2);  // (N, H)
  Tensor score_source = sum_axis(mul(z, att_source_), 2);
  Tensor logits = leaky_relu(add(gather_rows(score_target, edges.targets),
                                 gather_rows(score_source, edges.sources)),
                             config_.negative_slope);
  Tensor alpha = segment_softmax(logits, edges.targets, N);  // (E, H)
  if (ctx.trace != nullptr) ctx.trace->gat_alpha.push_back(alpha);
  if (ctx.stochastic()) alpha = dropout(alpha, ctx.dropout, ctx.dropout_rng(), true);

  Tensor hidden = elu(reshape(edge_aggregate(alpha, z, edges.sources, edges.targets, N), {N, H * D}));
  if (ctx.stochastic()) hidden = dropout(hidden, ctx.dropout, ctx.dropout_rng(), true);
  Tensor out = out_(hidden);
  return config_.residual ? add(out, nodes) : out;
}

double GatLayer::attention_logit(std::span<const double> target, std::span<const double> source,
                                 std::size_t head) const {
  if (target.size() != config_.in_dim || source.size() != config_.in_dim) {
    throw DimensionError("attention_logit expects vectors of width " +
                         std::to_string(config_.in_dim));
  }
  if (head >= config_.heads) throw ContractError("head index out of range");
  const std::size_t D = head_dim();
  const auto W = weight_.data();
  const auto at = att_target_.data();
  const auto as = att_source_.data();
  double e = 0.0;
  for (std::size_t c = 0; c < D; ++c) {
    const std::size_t col = head * D + c;
    double wt = 0.0, ws = 0.0;
    for (std::size_t r = 0; r < config_.in_dim; ++r) {
      wt += target[r] * W[r * config_.hidden + col];
      ws += source[r] * W[r * config_.hidden + col];
    }
    e += at[head * D + c] * wt + as[head * D + c] * ws;
  }
  return e >= 0.0 ? e : config_.negative_slope * e;
}

}  // namespace graphfuse
