// SPDX-License-Identifier: Apache-2.0
//
// Contextual token encoder: trainable embeddings plus fixed sinusoidal
// positions, an optional stack of post-norm self-attention blocks, and a
// linear projection to the width consumed by the graph stage.

#pragma once

#include <cstddef>
#include <vector>

#include "graphfuse/attention.hpp"
#include "graphfuse/batch.hpp"
#include "graphfuse/forward.hpp"
#include "graphfuse/params.hpp"

namespace graphfuse {

/// (n x d_emb) table: column 2i is sin(pos / 10000^(2i/d_emb)), column 2i+1
/// the matching cosine. ConfigError if d_emb is odd.
Tensor positional_encoding(std::size_t n, std::size_t d_emb);

struct EncoderConfig {
  std::size_t vocab_size = 0;
  std::size_t d_emb = 64;
  std::size_t d_model = 64;
  std::size_t layers = 1;
  std::size_t heads = 4;
  std::size_t d_ff = 256;
  // Self-attention radius; 0 lets every token see the whole sentence.
  std::size_t window = 0;
};

class EncoderLayer {
 public:
  EncoderLayer(ParamStore& store, const std::string& prefix, std::size_t width,
               std::size_t heads, std::size_t d_ff, Rng& init);
  Tensor operator()(const Tensor& x, const Tensor& key_bias,
                    std::span<const std::size_t> lengths, ForwardContext& ctx) const;

 private:
  MultiHeadAttention attn_;
  Linear ff1_, ff2_;
  LayerNorm norm1_, norm2_;
};

class Encoder {
 public:
  Encoder(ParamStore& store, const EncoderConfig& config, Rng& init);

  /// (B, n, d_model). Token ids must be < vocab_size.
  Tensor operator()(const Batch& batch, ForwardContext& ctx) const;

  const EncoderConfig& config() const { return config_; }

 private:
  EncoderConfig config_;
  Tensor embedding_;
  std::vector<EncoderLayer> layers_;
  Linear projection_;
};

}  // namespace graphfuse
