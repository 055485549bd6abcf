// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "graphfuse/params.hpp"

namespace graphfuse {

class ClassifierHead {
 public:
  ClassifierHead() = default;
  ClassifierHead(ParamStore& store, std::size_t d_model, std::size_t num_labels, Rng& init);

  /// (B, n, d) -> logits (B, n, L); no softmax.
  Tensor operator()(const Tensor& hidden) const { return linear_(hidden); }

  const Tensor& weight() const { return linear_.weight; }
  const Tensor& bias() const { return linear_.bias; }

 private:
  Linear linear_;
};

/// Mean over positions whose label is not kIgnoreId of -log softmax(logits)[gold].
/// logits (..., L); labels hold one id per row of logits. Ignored rows get
/// exactly zero gradient. DegenerateBatchError if every row is ignored.
Tensor masked_cross_entropy(const Tensor& logits, std::span<const int> labels);

/// Argmax over the last axis; ties go to the lowest index.
std::vector<int> argmax_last(const Tensor& logits);

}  // namespace graphfuse
