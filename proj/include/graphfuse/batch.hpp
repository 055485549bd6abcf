// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "graphfuse/conll.hpp"
#include "graphfuse/rng.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {

/// Padded mini-batch, row-major (batch_size x max_len). Positions past a
/// row's length are padding: mask 0, token kPadId, label kIgnoreId.
struct Batch {
  std::size_t batch_size = 0;
  std::size_t max_len = 0;
  std::vector<std::size_t> token_ids;
  std::vector<std::uint8_t> attention_mask;
  std::vector<int> label_ids;
  std::vector<std::size_t> lengths;
  /// Index of each row's sentence in the source corpus.
  std::vector<std::size_t> sentence_index;

  std::size_t at(std::size_t row, std::size_t col) const { return row * max_len + col; }
};

/// Splits `corpus` into batches of at most `batch_size` sentences, each
/// truncated to `max_len` tokens. With `labels == nullptr` every label id is
/// kIgnoreId. With `shuffle != nullptr` sentence order is permuted first.
std::vector<Batch> make_batches(const Corpus& corpus, std::size_t batch_size,
                                std::size_t max_len, const TokenVocab& tokens,
                                const LabelVocab* labels, Rng* shuffle = nullptr);

}  // namespace graphfuse
