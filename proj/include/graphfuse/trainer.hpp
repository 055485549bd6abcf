// SPDX-License-Identifier: Apache-2.0
//
// Joint optimization: AdamW with decoupled weight decay, linear warmup then
// linear decay, global-norm gradient clipping, early stopping on
// validation micro-F1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "graphfuse/conll.hpp"
#include "graphfuse/model.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {

struct TrainConfig {
  double learning_rate = 5e-5;
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double warmup_ratio = 0.1;
  double dropout = 0.3;
  std::size_t batch_size = 16;
  std::size_t epochs = 15;
  std::size_t max_len = 128;
  std::size_t patience = 3;
  std::uint64_t seed = 13;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base = {});

std::size_t warmup_steps(std::size_t total_steps, double warmup_ratio);

/// Linear ramp 0 -> peak over round(warmup_ratio * total) steps, then
/// linear decay to 0 at `total_steps`.
double lr_schedule(std::size_t step, std::size_t total_steps, double warmup_ratio, double peak);

/// Rescales all buffers by max_norm / norm when their joint L2 norm exceeds
/// max_norm. Returns the factor applied (1 when untouched).
double clip_gradients(std::span<const std::span<double>> grads, double max_norm);
double clip_gradients(ParamStore& params, double max_norm);

struct OptState {
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
  std::size_t step = 0;
};

OptState make_opt_state(const ParamStore& params);

/// One AdamW update with bias correction. Parameters flagged decay=false
/// (biases, norms) skip the decoupled shrink theta <- theta - lr*wd*theta.
void adamw_step(ParamStore& params, OptState& state, double lr, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
};

nlohmann::json to_json(const EpochRecord& r);

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_micro_f1 = 0.0;
  std::size_t steps = 0;
};

/// Trains in place and leaves the best-validation parameters loaded.
/// DivergenceError names the step whose loss was not finite.
TrainResult train(TextGraphModel& model, const Corpus& train_set, const Corpus& valid_set,
                  const TokenVocab& tokens, const LabelVocab& labels, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

}  // namespace graphfuse
