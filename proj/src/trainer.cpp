// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/trainer.hpp"

#include <cmath>

#include "graphfuse/batch.hpp"
#include "graphfuse/errors.hpp"
#include "graphfuse/inference.hpp"

namespace graphfuse {
namespace {

// Rng streams derived from the run seed.
constexpr std::uint64_t kShuffleStream = 1ULL << 32;
constexpr std::uint64_t kDropoutStream = 2ULL << 32;

}  // namespace

void TrainConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(learning_rate >= 0.0, "learning_rate must be >= 0");
  require(weight_decay >= 0.0, "weight_decay must be >= 0");
  require(clip_norm > 0.0, "clip_norm must be > 0");
  require(warmup_ratio >= 0.0 && warmup_ratio < 1.0, "warmup_ratio must lie in [0, 1)");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  require(batch_size >= 1, "batch_size must be >= 1");
  require(epochs >= 1, "epochs must be >= 1");
  require(max_len >= 1, "max_len must be >= 1");
  require(patience >= 1, "patience must be >= 1");
  require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0, "betas must lie in [0, 1)");
  require(eps > 0.0, "eps must be > 0");
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"learning_rate", c.learning_rate}, {"weight_decay", c.weight_decay},
          {"clip_norm", c.clip_norm},         {"warmup_ratio", c.warmup_ratio},
          {"dropout", c.dropout},             {"batch_size", c.batch_size},
          {"epochs", c.epochs},               {"max_len", c.max_len},
          {"patience", c.patience},           {"seed", c.seed},
          {"beta1", c.beta1},                 {"beta2", c.beta2},
          {"eps", c.eps}};
}

TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  try {
    get("learning_rate", c.learning_rate);
    get("weight_decay", c.weight_decay);
    get("clip_norm", c.clip_norm);
    get("warmup_ratio", c.warmup_ratio);
    get("dropout", c.dropout);
    get("batch_size", c.batch_size);
    get("epochs", c.epochs);
    get("max_len", c.max_len);
    get("patience", c.patience);
    get("seed", c.seed);
    get("beta1", c.beta1);
    get("beta2", c.beta2);
    get("eps", c.eps);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return c;
}

std::size_t warmup_steps(std::size_t total_steps, double warmup_ratio) {
  return static_cast<std::size_t>(std::llround(warmup_ratio * static_cast<double>(total_steps)));
}

double lr_schedule(std::size_t step, std::size_t total_steps, double warmup_ratio, double peak) {
  if (total_steps == 0) throw ConfigError("lr_schedule needs total_steps > 0");
  if (step > total_steps) {
    throw ContractError("step " + std::to_string(step) + " beyond total " +
                        std::to_string(total_steps));
  }
  const std::size_t warmup = warmup_steps(total_steps, warmup_ratio);
  if (step < warmup) return peak * (static_cast<double>(step) / static_cast<double>(warmup));
  if (total_steps == warmup) return peak;
  return peak * (static_cast<double>(total_steps - step) /
                 static_cast<double>(total_steps - warmup));
}

double clip_gradients(std::span<const std::span<double>> grads, double max_norm) {
  if (!(max_norm > 0.0)) throw ConfigError("max_norm must be > 0");
  double sq = 0.0;
  for (const auto& g : grads)
    for (double v : g) sq += v * v;
  const double norm = std::sqrt(sq);
  if (!(norm > max_norm)) return 1.0;
  const double factor = max_norm / norm;
  for (const auto& g : grads)
    for (double& v : g) v *= factor;
  return factor;
}

double clip_gradients(ParamStore& params, double max_norm) {
  std::vector<std::span<double>> grads;
  grads.reserve(params.size());
  for (Parameter& p : params.params()) grads.push_back(p.value.grad());
  return clip_gradients(grads, max_norm);
}

OptState make_opt_state(const ParamStore& params) {
  OptState s;
  for (const Parameter& p : params.params()) {
    s.first_moment.emplace_back(p.value.numel(), 0.0);
    s.second_moment.emplace_back(p.value.numel(), 0.0);
  }
  return s;
}

void adamw_step(ParamStore& params, OptState& state, double lr, const TrainConfig& config) {
  if (state.first_moment.size() != params.size()) {
    throw ContractError("optimizer state does not match parameter set");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.params()[i];
    auto theta = p.value.mutable_data();
    const auto grad = p.value.grad();
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    if (m.size() != theta.size()) throw ContractError("optimizer state shape mismatch: " + p.name);
    const double shrink = p.decay ? lr * config.weight_decay : 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) {
      theta[k] -= shrink * theta[k];
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * grad[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * grad[k] * grad[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      theta[k] -= lr * m_hat / (std::sqrt(v_hat) + config.eps);
    }
  }
}

nlohmann::json to_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},
          {"train_loss", r.train_loss},
          {"micro_f1", r.micro_f1},
          {"macro_f1", r.macro_f1}};
}

TrainResult train(TextGraphModel& model, const Corpus& train_set, const Corpus& valid_set,
                  const TokenVocab& tokens, const LabelVocab& labels, const TrainConfig& config,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DataError("training corpus is empty");
  if (valid_set.empty()) throw DataError("validation corpus is empty");

  ParamStore& params = model.params();
  OptState opt = make_opt_state(params);
  const Rng root(config.seed);
  const std::size_t per_epoch = (train_set.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = per_epoch * config.epochs;
  const std::size_t threads = eval_threads();

  TrainResult result;
  std::vector<std::vector<double>> best;
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Rng shuffle = root.split(kShuffleStream + epoch);
    const std::vector<Batch> batches =
        make_batches(train_set, config.batch_size, config.max_len, tokens, &labels, &shuffle);
    double loss_sum = 0.0;
    std::size_t counted = 0;
    for (const Batch& batch : batches) {
      params.zero_grad();
      Rng dropout_rng = root.split(kDropoutStream + step);
      ForwardContext ctx{true, config.dropout, &dropout_rng, nullptr};
      Tensor loss;
      try {
        loss = model.loss(batch, ctx);
      } catch (const DegenerateBatchError&) {
        ++step;  // batch made entirely of ignored labels; nothing to learn
        continue;
      }
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw DivergenceError(step, "training loss is " + std::to_string(value));
      }
      loss.backward();
      clip_gradients(params, config.clip_norm);
      adamw_step(params, opt, lr_schedule(step, total_steps, config.warmup_ratio,
                                          config.learning_rate),
                 config);
      loss_sum += value;
      ++counted;
      ++step;
    }

    const EvalReport report = evaluate(model, valid_set, tokens, labels, config.batch_size,
                                       config.max_len, threads);
    EpochRecord record{epoch, counted ? loss_sum / static_cast<double>(counted) : 0.0,
                       report.micro.f1, report.macro.f1};
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);

    if (result.best_epoch == 0 || record.micro_f1 > result.best_micro_f1) {
      result.best_epoch = epoch;
      result.best_micro_f1 = record.micro_f1;
      best.clear();
      for (const Parameter& p : params.params()) {
        best.emplace_back(p.value.data().begin(), p.value.data().end());
      }
    } else if (epoch - result.best_epoch >= config.patience) {
      break;
    }
  }
  result.steps = step;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto dst = params.params()[i].value.mutable_data();
    std::copy(best[i].begin(), best[i].end(), dst.begin());
  }
  return result;
}

}  // namespace graphfuse
