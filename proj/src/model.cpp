// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/model.hpp"

#include "graphfuse/errors.hpp"
#include "graphfuse/ops.hpp"
#include "graphfuse/token_graph.hpp"

namespace graphfuse {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::kEncoderOnly: return "encoder";
    case Variant::kEncoderGat: return "gat";
    case Variant::kFull: return "full";
  }
  return "full";
}

Variant parse_variant(std::string_view name) {
  if (name == "encoder") return Variant::kEncoderOnly;
  if (name == "gat") return Variant::kEncoderGat;
  if (name == "full") return Variant::kFull;
  throw ConfigError("unknown variant '" + std::string(name) + "' (expected encoder, gat or full)");
}

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(vocab_size >= 2, "vocab_size must be >= 2");
  require(num_labels >= 2, "num_labels must be >= 2");
  require(d_emb > 0 && d_emb % 2 == 0, "d_emb must be a positive even number");
  require(d_model > 0, "d_model must be positive");
  require(enc_layers == 0 || (enc_heads > 0 && d_emb % enc_heads == 0),
          "d_emb must be divisible by enc_heads");
  require(gat_heads > 0 && gat_hidden % gat_heads == 0 && gat_hidden > 0,
          "gat_hidden must be a positive multiple of gat_heads");
  require(gat_negative_slope > 0.0 && gat_negative_slope < 1.0,
          "gat_negative_slope must lie in (0, 1)");
  require(dec_layers >= 1, "dec_layers must be >= 1");
  require(dec_heads > 0 && d_model % dec_heads == 0, "d_model must be divisible by dec_heads");
}

nlohmann::json to_json(const ModelConfig& c) {
  return {{"vocab_size", c.vocab_size},
          {"num_labels", c.num_labels},
          {"d_emb", c.d_emb},
          {"d_model", c.d_model},
          {"enc_layers", c.enc_layers},
          {"enc_heads", c.enc_heads},
          {"enc_ff", c.enc_ff},
          {"enc_window", c.enc_window},
          {"gat_hidden", c.gat_hidden},
          {"gat_heads", c.gat_heads},
          {"gat_negative_slope", c.gat_negative_slope},
          {"gat_residual", c.gat_residual},
          {"dec_layers", c.dec_layers},
          {"dec_heads", c.dec_heads},
          {"dec_ff", c.dec_ff},
          {"variant", std::string(variant_name(c.variant))}};
}

ModelConfig model_config_from_json(const nlohmann::json& j, ModelConfig c) {
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
  };
  try {
    get("vocab_size", c.vocab_size);
    get("num_labels", c.num_labels);
    get("d_emb", c.d_emb);
    get("d_model", c.d_model);
    get("enc_layers", c.enc_layers);
    get("enc_heads", c.enc_heads);
    get("enc_ff", c.enc_ff);
    get("enc_window", c.enc_window);
    get("gat_hidden", c.gat_hidden);
    get("gat_heads", c.gat_heads);
    get("gat_negative_slope", c.gat_negative_slope);
    get("gat_residual", c.gat_residual);
    get("dec_layers", c.dec_layers);
    get("dec_heads", c.dec_heads);
    get("dec_ff", c.dec_ff);
    if (j.contains("variant")) c.variant = parse_variant(j.at("variant").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model config: ") + e.what());
  }
  return c;
}

TextGraphModel::TextGraphModel(const ModelConfig& config, std::uint64_t init_seed)
    : config_(config) {
  config_.validate();
  Rng init(init_seed);
  EncoderConfig enc{config_.vocab_size, config_.d_emb,    config_.d_model, config_.enc_layers,
                    config_.enc_heads,  config_.enc_ff ? config_.enc_ff : 4 * config_.d_emb,
                    config_.enc_window};
  encoder_.emplace(params_, enc, init);
  if (config_.variant != Variant::kEncoderOnly) {
    GatConfig gat{config_.d_model, config_.gat_hidden, config_.gat_heads,
                  config_.gat_negative_slope, config_.gat_residual};
    gat_.emplace(params_, "gat", gat, init);
  }
  if (config_.variant == Variant::kFull) {
    DecoderConfig dec{config_.d_model, config_.dec_heads,
                      config_.dec_ff ? config_.dec_ff : 4 * config_.d_model, config_.dec_layers};
    decoder_.emplace(params_, dec, init);
  }
  head_ = ClassifierHead(params_, config_.d_model, config_.num_labels, init);
}

Tensor TextGraphModel::forward(const Batch& batch, ForwardContext& ctx) const {
  const std::size_t B = batch.batch_size;
  const std::size_t n = batch.max_len;
  Tensor h = (*encoder_)(batch, ctx);  // (B, n, d)
  if (gat_) {
    // Real tokens become graph nodes; padding gets no node and comes back as zeros.
    std::vector<std::size_t> rows;
    rows.reserve(B * n);
    for (std::size_t b = 0; b < B; ++b)
      for (std::size_t j = 0; j < batch.lengths[b]; ++j) rows.push_back(b * n + j);
    const EdgeIndex edges = build_fully_connected(batch.lengths);
    Tensor nodes = gather_rows(reshape(h, {B * n, config_.d_model}), rows);
    Tensor graph_out = (*gat_)(nodes, edges, ctx);
    h = reshape(scatter_add_rows(graph_out, rows, B * n), {B, n, config_.d_model});
  }
  if (decoder_) h = (*decoder_)(h, batch.lengths, ctx);
  return head_(h);
}

Tensor TextGraphModel::loss(const Batch& batch, ForwardContext& ctx) const {
  return masked_cross_entropy(forward(batch, ctx), batch.label_ids);
}

std::vector<std::vector<int>> TextGraphModel::predict(const Batch& batch) const {
  NoGradGuard no_grad;
  ForwardContext ctx;
  const std::vector<int> flat = argmax_last(forward(batch, ctx));
  std::vector<std::vector<int>> out(batch.batch_size);
  for (std::size_t b = 0; b < batch.batch_size; ++b) {
    out[b].assign(flat.begin() + static_cast<long>(b * batch.max_len),
                  flat.begin() + static_cast<long>(b * batch.max_len + batch.lengths[b]));
  }
  return out;
}

}  // namespace graphfuse
