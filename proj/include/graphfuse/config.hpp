// SPDX-License-Identifier: Apache-2.0
//
// Run settings assembled from layered sources. Later layers win:
// built-in defaults < named preset < JSON config file < command-line flags.
//
// Config files hold {"model": {...}, "train": {...}}; any key may be omitted.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphfuse/model.hpp"
#include "graphfuse/trainer.hpp"

namespace graphfuse {

struct RunSettings {
  ModelConfig model;
  TrainConfig train;
};

/// phoner, vietmed, disfluency carry the published hyperparameters; copy and
/// relational are small settings sized for the synthetic tasks.
std::vector<std::string> preset_names();
/// ConfigError naming the known presets when `name` is not one of them.
RunSettings preset(std::string_view name);

nlohmann::json to_json(const RunSettings& s);
/// Overlays the keys present in `j` onto `base`. ConfigError on unknown
/// top-level sections.
RunSettings apply_config_json(const nlohmann::json& j, RunSettings base);
RunSettings apply_config_file(const std::string& path, RunSettings base);

/// Command-line overrides; unset fields leave the settings untouched.
struct Overrides {
  std::optional<std::string> variant;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> epochs;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> max_len;
  std::optional<std::size_t> heads;   // GAT heads
  std::optional<std::size_t> hidden;  // GAT hidden width
};

RunSettings apply_overrides(const Overrides& o, RunSettings base);

/// defaults -> preset (if any) -> file (if any) -> overrides, then validated.
RunSettings resolve_settings(const std::optional<std::string>& preset_name,
                             const std::optional<std::string>& config_path,
                             const Overrides& overrides);

}  // namespace graphfuse
