// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/inference.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>

#include "graphfuse/batch.hpp"

namespace graphfuse {

std::size_t eval_threads() {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GRAPHFUSE_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min(n, static_cast<std::size_t>(cap));
  }
  return n;
}

std::vector<std::vector<std::string>> predict_labels(
    const TextGraphModel& model, const std::vector<std::vector<std::string>>& sentences,
    const TokenVocab& tokens, const LabelVocab& labels, std::size_t batch_size,
    std::size_t max_len, std::size_t threads) {
  Corpus corpus;
  corpus.reserve(sentences.size());
  for (const auto& s : sentences) corpus.push_back(Sentence{s, {}});
  const std::vector<Batch> batches = make_batches(corpus, batch_size, max_len, tokens, nullptr);

  std::vector<std::vector<std::string>> out(sentences.size());
  for (std::size_t s = 0; s < sentences.size(); ++s) out[s].assign(sentences[s].size(), "O");

  // Each batch writes only its own sentences, so workers never collide.
  auto run = [&](std::size_t b) {
    const Batch& batch = batches[b];
    const auto ids = model.predict(batch);
    for (std::size_t row = 0; row < batch.batch_size; ++row) {
      auto& dst = out[batch.sentence_index[row]];
      for (std::size_t j = 0; j < ids[row].size(); ++j) dst[j] = labels.label(ids[row][j]);
    }
  };
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, batches.size()));
  if (threads == 1) {
    for (std::size_t b = 0; b < batches.size(); ++b) run(b);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t b = t; b < batches.size(); b += threads) run(b);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

EvalReport evaluate(const TextGraphModel& model, const Corpus& corpus, const TokenVocab& tokens,
                    const LabelVocab& labels, std::size_t batch_size, std::size_t max_len,
                    std::size_t threads) {
  std::vector<std::vector<std::string>> sentences, gold;
  sentences.reserve(corpus.size());
  gold.reserve(corpus.size());
  for (const Sentence& s : corpus) {
    for (const std::string& label : s.labels) labels.id(label);  // DataError if unknown
    sentences.push_back(s.tokens);
    gold.push_back(s.labels);
  }
  return score(gold, predict_labels(model, sentences, tokens, labels, batch_size, max_len, threads));
}

}  // namespace graphfuse
