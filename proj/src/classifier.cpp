// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/classifier.hpp"

#include <cmath>
#include <limits>

#include "graphfuse/errors.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {

ClassifierHead::ClassifierHead(ParamStore& store, std::size_t d_model, std::size_t num_labels,
                               Rng& init) {
  if (num_labels < 2) throw ConfigError("classifier needs at least 2 labels");
  linear_ = Linear(store, "classifier", d_model, num_labels, init);
}

Tensor masked_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() == 0) throw DimensionError("cross entropy on a scalar");
  const std::size_t L = logits.shape().back();
  const std::size_t rows = logits.numel() / L;
  if (labels.size() != rows) {
    throw DimensionError("cross entropy: " + std::to_string(labels.size()) + " labels for logits " +
                         shape_str(logits.shape()));
  }
  std::size_t valid = 0;
  for (int y : labels) {
    if (y == LabelVocab::kIgnoreId) continue;
    if (y < 0 || static_cast<std::size_t>(y) >= L) {
      throw ContractError("label id " + std::to_string(y) + " out of range for " +
                          std::to_string(L) + " classes");
    }
    ++valid;
  }
  if (valid == 0) throw DegenerateBatchError("cross entropy over a batch with no unmasked positions");

  const auto x = logits.data();
  auto probs = std::make_shared<std::vector<double>>(rows * L, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const int y = labels[r];
    if (y == LabelVocab::kIgnoreId) continue;
    const double* row = x.data() + r * L;
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < L; ++c) mx = std::max(mx, row[c]);
    double z = 0.0;
    for (std::size_t c = 0; c < L; ++c) z += std::exp(row[c] - mx);
    const double log_z = mx + std::log(z);
    total += log_z - row[y];
    for (std::size_t c = 0; c < L; ++c) (*probs)[r * L + c] = std::exp(row[c] - log_z);
  }
  const double inv = 1.0 / static_cast<double>(valid);
  auto gold = std::make_shared<std::vector<int>>(labels.begin(), labels.end());
  return Tensor::make_result(Shape{}, {total * inv}, {logits},
                             [probs, gold, rows, L, inv](detail::Node& self) {
                               auto& parent = *self.parents[0];
                               if (!parent.requires_grad) return;
                               double* gx = parent.ensure_grad().data();
                               const double g = self.grad[0] * inv;
                               for (std::size_t r = 0; r < rows; ++r) {
                                 const int y = (*gold)[r];
                                 if (y == LabelVocab::kIgnoreId) continue;
                                 for (std::size_t c = 0; c < L; ++c) {
                                   const double onehot = static_cast<int>(c) == y ? 1.0 : 0.0;
                                   gx[r * L + c] += g * ((*probs)[r * L + c] - onehot);
                                 }
                               }
                             });
}

std::vector<int> argmax_last(const Tensor& logits) {
  const std::size_t L = logits.shape().back();
  const std::size_t rows = logits.numel() / L;
  const auto x = logits.data();
  std::vector<int> out(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < L; ++c)
      if (x[r * L + c] > x[r * L + best]) best = c;
    out[r] = static_cast<int>(best);
  }
  return out;
}

}  // namespace graphfuse
