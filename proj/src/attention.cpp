// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/attention.hpp"

#include <cmath>
#include <limits>

#include "graphfuse/ops.hpp"

namespace graphfuse {

Tensor key_padding_bias(std::span<const std::size_t> lengths, std::size_t n) {
  const std::size_t B = lengths.size();
  std::vector<double> bias(B * n, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t j = lengths[b]; j < n; ++j)
      bias[b * n + j] = -std::numeric_limits<double>::infinity();
  return Tensor({B, 1, 1, n}, std::move(bias));
}

Tensor local_window_bias(std::span<const std::size_t> lengths, std::size_t n,
                         std::size_t window) {
  const std::size_t B = lengths.size();
  std::vector<double> bias(B * n * n, 0.0);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const std::size_t gap = i > j ? i - j : j - i;
        // Padded queries keep every real key so their rows stay normalizable.
        if (j >= lengths[b] || (gap > window && i < lengths[b]))
          bias[(b * n + i) * n + j] = -std::numeric_limits<double>::infinity();
      }
  return Tensor({B, 1, n, n}, std::move(bias));
}

MultiHeadAttention::MultiHeadAttention(ParamStore& store, const std::string& prefix,
                                       std::size_t d_model, std::size_t heads, Rng& init)
    : name_(prefix), d_model_(d_model), heads_(heads) {
  if (heads == 0 || d_model % heads != 0) {
    throw ConfigError(prefix + ": width " + std::to_string(d_model) +
                      " is not divisible by " + std::to_string(heads) + " heads");
  }
  q_ = Linear(store, prefix + ".q", d_model, d_model, init);
  k_ = Linear(store, prefix + ".k", d_model, d_model, init);
  v_ = Linear(store, prefix + ".v", d_model, d_model, init);
  o_ = Linear(store, prefix + ".o", d_model, d_model, init);
}

Tensor MultiHeadAttention::operator()(const Tensor& query, const Tensor& memory,
                                      const Tensor& key_bias,
                                      std::span<const std::size_t> lengths,
                                      ForwardContext& ctx) const {
  const std::size_t B = query.dim(0);
  const std::size_t nq = query.dim(1);
  const std::size_t nk = memory.dim(1);
  const std::size_t dh = d_model_ / heads_;

  auto split = [&](const Tensor& x, std::size_t n) {
    return transpose(reshape(x, {B, n, heads_, dh}), 1, 2);  // (B, h, n, dh)
  };
  Tensor q = split(q_(query), nq);
  Tensor k = split(k_(memory), nk);
  Tensor v = split(v_(memory), nk);

  Tensor scores = scale(matmul(q, transpose(k, 2, 3)), 1.0 / std::sqrt(static_cast<double>(dh)));
  Tensor weights = softmax(add(scores, key_bias), 3);
  if (ctx.trace != nullptr) {
    ctx.trace->attention.push_back({name_, weights, {lengths.begin(), lengths.end()}});
  }
  if (ctx.stochastic()) weights = dropout(weights, ctx.dropout, ctx.dropout_rng(), true);
  Tensor context = matmul(weights, v);  // (B, h, nq, dh)
  return o_(reshape(transpose(context, 1, 2), {B, nq, d_model_}));
}

}  // namespace graphfuse
