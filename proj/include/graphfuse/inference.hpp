// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "graphfuse/conll.hpp"
#include "graphfuse/metrics.hpp"
#include "graphfuse/model.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {

/// Evaluation thread count: hardware concurrency, capped by the
/// GRAPHFUSE_THREADS environment variable when it holds a positive integer.
std::size_t eval_threads();

/// Eval-mode label strings per sentence. Tokens past `max_len` are labeled
/// "O". Batches fan out over `threads` workers; the result does not depend
/// on the thread count or on `batch_size`.
std::vector<std::vector<std::string>> predict_labels(
    const TextGraphModel& model, const std::vector<std::vector<std::string>>& sentences,
    const TokenVocab& tokens, const LabelVocab& labels, std::size_t batch_size,
    std::size_t max_len, std::size_t threads = 1);

/// DataError naming the first gold label the vocabulary does not know.
EvalReport evaluate(const TextGraphModel& model, const Corpus& corpus, const TokenVocab& tokens,
                    const LabelVocab& labels, std::size_t batch_size, std::size_t max_len,
                    std::size_t threads = 1);

}  // namespace graphfuse
