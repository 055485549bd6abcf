// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "graphfuse/forward.hpp"
#include "graphfuse/params.hpp"

namespace graphfuse {

/// Additive key mask (B, 1, 1, n): 0 on real positions, -inf on padding.
Tensor key_padding_bias(std::span<const std::size_t> lengths, std::size_t n);

/// Additive mask (B, 1, n, n) that also hides keys more than `window`
/// positions away from a real query. Padded queries see all real keys.
Tensor local_window_bias(std::span<const std::size_t> lengths, std::size_t n,
                         std::size_t window);

/// Scaled dot-product multi-head attention with Q/K/V/O projections and
/// dropout on the attention weights. No causal mask.
class MultiHeadAttention {
 public:
  MultiHeadAttention() = default;
  MultiHeadAttention(ParamStore& store, const std::string& prefix, std::size_t d_model,
                     std::size_t heads, Rng& init);

  /// query (B, nq, d), memory (B, nk, d); key_bias broadcasts against the
  /// (B, heads, nq, nk) scores, e.g. (B, 1, 1, nk) or (B, 1, nq, nk).
  Tensor operator()(const Tensor& query, const Tensor& memory, const Tensor& key_bias,
                    std::span<const std::size_t> lengths, ForwardContext& ctx) const;

  std::size_t heads() const { return heads_; }

 private:
  std::string name_;
  std::size_t d_model_ = 0;
  std::size_t heads_ = 1;
  Linear q_, k_, v_, o_;
};

}  // namespace graphfuse
