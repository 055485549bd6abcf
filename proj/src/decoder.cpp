// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/decoder.hpp"

#include "graphfuse/errors.hpp"
#include "graphfuse/ops.hpp"

namespace graphfuse {

DecoderLayer::DecoderLayer(ParamStore& store, const std::string& prefix,
                           const DecoderConfig& config, Rng& init)
    : self_attn_(store, prefix + ".self_attn", config.d_model, config.heads, init),
      cross_attn_(store, prefix + ".cross_attn", config.d_model, config.heads, init),
      ff1_(store, prefix + ".ff1", config.d_model, config.d_ff, init),
      ff2_(store, prefix + ".ff2", config.d_ff, config.d_model, init),
      norm1_(store, prefix + ".norm1", config.d_model),
      norm2_(store, prefix + ".norm2", config.d_model),
      norm3_(store, prefix + ".norm3", config.d_model) {}

Tensor DecoderLayer::operator()(const Tensor& target, const Tensor& memory,
                                const Tensor& key_bias, std::span<const std::size_t> lengths,
                                ForwardContext& ctx) const {
  auto drop = [&](const Tensor& t) {
    return ctx.stochastic() ? dropout(t, ctx.dropout, ctx.dropout_rng(), true) : t;
  };
  Tensor x = norm1_(add(target, drop(self_attn_(target, target, key_bias, lengths, ctx))));
  x = norm2_(add(x, drop(cross_attn_(x, memory, key_bias, lengths, ctx))));
  Tensor ff = ff2_(drop(relu(ff1_(x))));
  return norm3_(add(x, drop(ff)));
}

DecoderRefiner::DecoderRefiner(ParamStore& store, const DecoderConfig& config, Rng& init)
    : config_(config) {
  if (config.heads == 0 || config.d_model % config.heads != 0) {
    throw ConfigError("decoder width " + std::to_string(config.d_model) +
                      " is not divisible by " + std::to_string(config.heads) + " heads");
  }
  if (config.layers == 0) throw ConfigError("decoder needs at least one layer");
  for (std::size_t l = 0; l < config.layers; ++l) {
    layers_.emplace_back(store, "decoder.layer" + std::to_string(l), config, init);
  }
}

Tensor DecoderRefiner::operator()(const Tensor& input, std::span<const std::size_t> lengths,
                                  ForwardContext& ctx) const {
  if (input.rank() != 3 || input.dim(2) != config_.d_model || input.dim(0) != lengths.size()) {
    throw DimensionError("decoder input " + shape_str(input.shape()) + " does not match width " +
                         std::to_string(config_.d_model) + " and " +
                         std::to_string(lengths.size()) + " samples");
  }
  const Tensor key_bias = key_padding_bias(lengths, input.dim(1));
  Tensor x = input;
  for (const DecoderLayer& layer : layers_) x = layer(x, input, key_bias, lengths, ctx);
  return x;
}

}  // namespace graphfuse
