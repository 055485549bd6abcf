// SPDX-License-Identifier: Apache-2.0
//
// Token classifier: encoder -> fully connected token graph -> GAT ->
// decoder refiner -> linear head. The variant switches off trailing stages
// to form the ablation rows.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphfuse/batch.hpp"
#include "graphfuse/classifier.hpp"
#include "graphfuse/decoder.hpp"
#include "graphfuse/encoder.hpp"
#include "graphfuse/forward.hpp"
#include "graphfuse/gat.hpp"
#include "graphfuse/params.hpp"

namespace graphfuse {

enum class Variant { kEncoderOnly, kEncoderGat, kFull };

/// "encoder", "gat", "full".
std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t num_labels = 0;
  std::size_t d_emb = 64;
  std::size_t d_model = 64;
  std::size_t enc_layers = 1;
  std::size_t enc_heads = 4;
  std::size_t enc_ff = 0;  // 0 -> 4 * d_emb
  std::size_t enc_window = 0;  // 0 -> unrestricted self-attention
  std::size_t gat_hidden = 32;
  std::size_t gat_heads = 4;
  double gat_negative_slope = 0.2;
  bool gat_residual = false;
  std::size_t dec_layers = 1;
  std::size_t dec_heads = 4;
  std::size_t dec_ff = 0;  // 0 -> 4 * d_model
  Variant variant = Variant::kFull;

  /// ConfigError on inconsistent widths/head counts.
  void validate() const;
};

nlohmann::json to_json(const ModelConfig& c);
/// Missing keys keep the values already in `base`.
ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig base = {});

class TextGraphModel {
 public:
  TextGraphModel(const ModelConfig& config, std::uint64_t init_seed);
  TextGraphModel(const TextGraphModel&) = delete;
  TextGraphModel& operator=(const TextGraphModel&) = delete;
  TextGraphModel(TextGraphModel&&) = default;

  /// Logits (B, n, num_labels).
  Tensor forward(const Batch& batch, ForwardContext& ctx) const;
  Tensor loss(const Batch& batch, ForwardContext& ctx) const;
  /// Eval-mode label ids, one vector per row trimmed to its length.
  std::vector<std::vector<int>> predict(const Batch& batch) const;

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

 private:
  ModelConfig config_;
  ParamStore params_;
  std::optional<Encoder> encoder_;
  std::optional<GatLayer> gat_;
  std::optional<DecoderRefiner> decoder_;
  ClassifierHead head_;
};

}  // namespace graphfuse
