// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/batch.hpp"

#include <algorithm>
#include <numeric>

#include "graphfuse/errors.hpp"

namespace graphfuse {

std::vector<Batch> make_batches(const Corpus& corpus, std::size_t batch_size,
                                std::size_t max_len, const TokenVocab& tokens,
                                const LabelVocab* labels, Rng* shuffle) {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_len < 1) throw ConfigError("max_len must be >= 1");

  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle != nullptr) shuffle->shuffle(order.begin(), order.end());

  std::vector<Batch> batches;
  for (std::size_t start = 0; start < order.size(); start += batch_size) {
    const std::size_t stop = std::min(order.size(), start + batch_size);
    Batch b;
    b.batch_size = stop - start;
    for (std::size_t r = start; r < stop; ++r) {
      const Sentence& s = corpus[order[r]];
      if (s.tokens.empty()) {
        throw DataError("sentence " + std::to_string(order[r]) + " is empty");
      }
      const std::size_t len = std::min(s.tokens.size(), max_len);
      b.lengths.push_back(len);
      b.sentence_index.push_back(order[r]);
      b.max_len = std::max(b.max_len, len);
    }
    const std::size_t cells = b.batch_size * b.max_len;
    b.token_ids.assign(cells, TokenVocab::kPadId);
    b.attention_mask.assign(cells, 0);
    b.label_ids.assign(cells, LabelVocab::kIgnoreId);
    for (std::size_t row = 0; row < b.batch_size; ++row) {
      const Sentence& s = corpus[b.sentence_index[row]];
      for (std::size_t j = 0; j < b.lengths[row]; ++j) {
        b.token_ids[b.at(row, j)] = tokens.id(s.tokens[j]);
        b.attention_mask[b.at(row, j)] = 1;
        if (labels != nullptr && j < s.labels.size()) {
          b.label_ids[b.at(row, j)] = labels->id(s.labels[j]);
        }
      }
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

}  // namespace graphfuse
