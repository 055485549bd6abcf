// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/encoder.hpp"

#include <cmath>

#include "graphfuse/errors.hpp"
#include "graphfuse/ops.hpp"

namespace graphfuse {

Tensor positional_encoding(std::size_t n, std::size_t d_emb) {
  if (d_emb == 0 || d_emb % 2 != 0) {
    throw ConfigError("positional encoding width must be even, got " + std::to_string(d_emb));
  }
  std::vector<double> table(n * d_emb);
  for (std::size_t pos = 0; pos < n; ++pos) {
    for (std::size_t i = 0; i < d_emb; i += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(d_emb));
      const double angle = static_cast<double>(pos) * freq;
      table[pos * d_emb + i] = std::sin(angle);
      table[pos * d_emb + i + 1] = std::cos(angle);
    }
  }
  return Tensor({n, d_emb}, std::move(table));
}

EncoderLayer::EncoderLayer(ParamStore& store, const std::string& prefix, std::size_t width,
                           std::size_t heads, std::size_t d_ff, Rng& init)
    : attn_(store, prefix + ".self_attn", width, heads, init),
      ff1_(store, prefix + ".ff1", width, d_ff, init),
      ff2_(store, prefix + ".ff2", d_ff, width, init),
      norm1_(store, prefix + ".norm1", width),
      norm2_(store, prefix + ".norm2", width) {}

Tensor EncoderLayer::operator()(const Tensor& x, const Tensor& key_bias,
                                std::span<const std::size_t> lengths,
                                ForwardContext& ctx) const {
  auto drop = [&](const Tensor& t) {
    return ctx.stochastic() ? dropout(t, ctx.dropout, ctx.dropout_rng(), true) : t;
  };
  Tensor h = norm1_(add(x, drop(attn_(x, x, key_bias, lengths, ctx))));
  Tensor ff = ff2_(drop(relu(ff1_(h))));
  return norm2_(add(h, drop(ff)));
}

Encoder::Encoder(ParamStore& store, const EncoderConfig& config, Rng& init) : config_(config) {
  if (config.vocab_size < 2) throw ConfigError("encoder vocabulary must hold at least 2 ids");
  if (config.d_emb == 0 || config.d_emb % 2 != 0) {
    throw ConfigError("embedding width must be even, got " + std::to_string(config.d_emb));
  }
  embedding_ = store.add_normal("encoder.embedding", {config.vocab_size, config.d_emb}, 1.0, init);
  for (std::size_t l = 0; l < config.layers; ++l) {
    layers_.emplace_back(store, "encoder.layer" + std::to_string(l), config.d_emb, config.heads,
                         config.d_ff, init);
  }
  projection_ = Linear(store, "encoder.projection", config.d_emb, config.d_model, init);
}

Tensor Encoder::operator()(const Batch& batch, ForwardContext& ctx) const {
  const std::size_t B = batch.batch_size;
  const std::size_t n = batch.max_len;
  for (std::size_t id : batch.token_ids) {
    if (id >= config_.vocab_size) {
      throw ContractError("token id " + std::to_string(id) + " out of range for vocabulary of " +
                          std::to_string(config_.vocab_size));
    }
  }
  Tensor x = reshape(gather_rows(embedding_, batch.token_ids), {B, n, config_.d_emb});
  x = add(x, positional_encoding(n, config_.d_emb));
  if (ctx.stochastic()) x = dropout(x, ctx.dropout, ctx.dropout_rng(), true);
  if (!layers_.empty()) {
    const Tensor key_bias = config_.window == 0
                                ? key_padding_bias(batch.lengths, n)
                                : local_window_bias(batch.lengths, n, config_.window);
    for (const EncoderLayer& layer : layers_) x = layer(x, key_bias, batch.lengths, ctx);
  }
  return projection_(x);
}

}  // namespace graphfuse
