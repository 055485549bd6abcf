// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/config.hpp"

#include <algorithm>

#include "graphfuse/conll.hpp"
#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

// Hyperparameters shared by the three published settings.
RunSettings published(double lr, std::size_t epochs, std::size_t gat_heads) {
  RunSettings s;
  s.model.gat_hidden = 256;
  s.model.gat_heads = gat_heads;
  s.train.learning_rate = lr;
  s.train.epochs = epochs;
  s.train.batch_size = 16;
  s.train.max_len = 128;
  s.train.weight_decay = 0.01;
  s.train.clip_norm = 1.0;
  s.train.warmup_ratio = 0.1;
  s.train.dropout = 0.3;
  return s;
}

// A narrow model for the synthetic corpora. Peak learning rates are far
// above the published ones because nothing here starts from pretrained
// weights.
RunSettings synthetic_base() {
  RunSettings s;
  s.model.d_emb = 32;
  s.model.d_model = 32;
  s.model.gat_hidden = 32;
  s.model.gat_heads = 4;
  s.train.dropout = 0.1;
  s.train.max_len = 64;
  return s;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"phoner", "vietmed", "disfluency", "copy", "relational"};
}

RunSettings preset(std::string_view name) {
  if (name == "phoner") return published(5e-5, 15, 8);
  if (name == "vietmed") return published(3e-5, 15, 8);
  if (name == "disfluency") return published(2e-5, 10, 4);
  if (name == "copy") {
    RunSettings s = synthetic_base();
    s.train.learning_rate = 5e-3;
    s.train.epochs = 20;
    s.train.patience = 5;
    return s;
  }
  if (name == "relational") {
    // The encoder only sees two tokens either side, so duplicates placed
    // 20+ tokens apart are invisible to it. The GAT residual keeps each
    // token's own features next to what it gathered from the graph.
    RunSettings s = synthetic_base();
    s.model.enc_window = 2;
    s.model.gat_residual = true;
    s.train.learning_rate = 5e-3;
    s.train.epochs = 30;
    s.train.patience = 5;
    return s;
  }
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

nlohmann::json to_json(const RunSettings& s) {
  return {{"model", to_json(s.model)}, {"train", to_json(s.train)}};
}

RunSettings apply_config_json(const nlohmann::json& j, RunSettings base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "model" && it.key() != "train") {
      throw ConfigError("unknown config section '" + it.key() + "' (expected model, train)");
    }
  }
  if (j.contains("model")) base.model = model_config_from_json(j.at("model"), base.model);
  if (j.contains("train")) base.train = train_config_from_json(j.at("train"), base.train);
  return base;
}

RunSettings apply_config_file(const std::string& path, RunSettings base) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return apply_config_json(j, std::move(base));
}

RunSettings apply_overrides(const Overrides& o, RunSettings s) {
  if (o.variant) s.model.variant = parse_variant(*o.variant);
  if (o.seed) s.train.seed = *o.seed;
  if (o.epochs) s.train.epochs = *o.epochs;
  if (o.learning_rate) s.train.learning_rate = *o.learning_rate;
  if (o.batch_size) s.train.batch_size = *o.batch_size;
  if (o.max_len) s.train.max_len = *o.max_len;
  if (o.heads) s.model.gat_heads = *o.heads;
  if (o.hidden) s.model.gat_hidden = *o.hidden;
  return s;
}

RunSettings resolve_settings(const std::optional<std::string>& preset_name,
                             const std::optional<std::string>& config_path,
                             const Overrides& overrides) {
  RunSettings s = preset_name ? preset(*preset_name) : RunSettings{};
  if (config_path) s = apply_config_file(*config_path, std::move(s));
  s = apply_overrides(overrides, std::move(s));
  s.train.validate();
  // Vocabulary sizes come from the data later; check everything else now.
  ModelConfig probe = s.model;
  probe.vocab_size = std::max<std::size_t>(probe.vocab_size, 2);
  probe.num_labels = std::max<std::size_t>(probe.num_labels, 2);
  probe.validate();
  return s;
}

}  // namespace graphfuse
