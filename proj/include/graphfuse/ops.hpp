// SPDX-License-Identifier: Apache-2.0
//
// Differentiable operations over Tensor. Binary elementwise ops broadcast
// with NumPy rules (shapes aligned on the right, size-1 dims stretch).

#pragma once

#include <cstddef>
#include <span>

#include "graphfuse/rng.hpp"
#include "graphfuse/tensor.hpp"

namespace graphfuse {

Shape broadcast_shape(const Shape& a, const Shape& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double value);

/// a: (..., m, k); b: (..., k, n) with identical leading dims, or (k, n)
/// shared across a's leading dims.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& x, std::size_t axis0, std::size_t axis1);
Tensor reshape(const Tensor& x, Shape shape);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor sum_axis(const Tensor& x, std::size_t axis, bool keepdim = false);

Tensor exp(const Tensor& x);
Tensor log(const Tensor& x);
Tensor square(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor elu(const Tensor& x, double alpha = 1.0);
/// x if x >= 0 else slope * x; slope must lie in (0, 1).
Tensor leaky_relu(const Tensor& x, double negative_slope);

/// Max-subtracted softmax along `axis`. Entries equal to -inf get weight 0.
Tensor softmax(const Tensor& x, std::size_t axis);

/// Normalizes over the last axis, then applies gain * x_hat + bias
/// (gain and bias shaped like the last axis). Biased variance.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5);

/// Rows of x (first axis) selected by `index`.
Tensor gather_rows(const Tensor& x, std::span<const std::size_t> index);
/// out[index[e]] += values[e]; out has `rows` rows.
Tensor scatter_add_rows(const Tensor& values, std::span<const std::size_t> index,
                        std::size_t rows);
/// Softmax of logits (E, ...) over the groups of rows sharing a segment id,
/// independently per trailing column.
Tensor segment_softmax(const Tensor& logits, std::span<const std::size_t> segment,
                       std::size_t num_segments);
/// out[targets[e], h, :] += weights[e, h] * values[sources[e], h, :] for
/// weights (E, H) and values (N, H, D); out has shape (rows, H, D).
Tensor edge_aggregate(const Tensor& weights, const Tensor& values,
                      std::span<const std::size_t> sources, std::span<const std::size_t> targets,
                      std::size_t rows);

/// Inverted-dropout multiplier: Bernoulli(1-p)/(1-p) in training mode,
/// all ones otherwise. p must lie in [0, 1).
Tensor dropout_mask(const Shape& shape, double p, Rng& rng, bool training);
/// x * dropout_mask(...); returns x itself when the mask would be all ones.
Tensor dropout(const Tensor& x, double p, Rng& rng, bool training);

}  // namespace graphfuse
