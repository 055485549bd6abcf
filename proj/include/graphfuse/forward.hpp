// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "graphfuse/errors.hpp"
#include "graphfuse/rng.hpp"
#include "graphfuse/tensor.hpp"

namespace graphfuse {

/// Attention weights captured during a forward pass, for inspection.
struct ForwardTrace {
  struct Attention {
    std::string name;
    Tensor weights;                    // (B, heads, n_query, n_key), pre-dropout
    std::vector<std::size_t> lengths;  // true key lengths per sample
  };
  std::vector<Attention> attention;
  std::vector<Tensor> gat_alpha;  // (edges, heads), pre-dropout
};

struct ForwardContext {
  bool training = false;
  double dropout = 0.0;
  Rng* rng = nullptr;  // required when training with dropout > 0
  ForwardTrace* trace = nullptr;

  bool stochastic() const { return training && dropout > 0.0; }
  Rng& dropout_rng() const {
    if (rng == nullptr) throw ContractError("training-mode dropout needs an Rng");
    return *rng;
  }
};

}  // namespace graphfuse
