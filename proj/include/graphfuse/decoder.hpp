// SPDX-License-Identifier: Apache-2.0
//
// Transformer decoder layer used as a non-autoregressive refiner: target and
// memory are the same sequence, no causal mask, padding keys masked in both
// attention blocks. Post-norm, ReLU feed-forward.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graphfuse/attention.hpp"
#include "graphfuse/forward.hpp"
#include "graphfuse/params.hpp"

namespace graphfuse {

struct DecoderConfig {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  std::size_t layers = 1;
};

class DecoderLayer {
 public:
  DecoderLayer(ParamStore& store, const std::string& prefix, const DecoderConfig& config,
               Rng& init);

  Tensor operator()(const Tensor& target, const Tensor& memory, const Tensor& key_bias,
                    std::span<const std::size_t> lengths, ForwardContext& ctx) const;

 private:
  MultiHeadAttention self_attn_;
  MultiHeadAttention cross_attn_;
  Linear ff1_, ff2_;
  LayerNorm norm1_, norm2_, norm3_;
};

class DecoderRefiner {
 public:
  DecoderRefiner(ParamStore& store, const DecoderConfig& config, Rng& init);

  /// (B, n, d) -> (B, n, d) with target = memory = `input`.
  Tensor operator()(const Tensor& input, std::span<const std::size_t> lengths,
                    ForwardContext& ctx) const;

 private:
  DecoderConfig config_;
  std::vector<DecoderLayer> layers_;
};

}  // namespace graphfuse
