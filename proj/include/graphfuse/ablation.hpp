// SPDX-License-Identifier: Apache-2.0
//
// Variant x seed matrix: the same data, settings and epoch budget for the
// encoder-only, encoder+GAT and full models, scored on the test split.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "graphfuse/config.hpp"
#include "graphfuse/model.hpp"
#include "graphfuse/synth.hpp"

namespace graphfuse {

inline constexpr Variant kAblationVariants[] = {Variant::kEncoderOnly, Variant::kEncoderGat,
                                                Variant::kFull};

struct AblationRun {
  Variant variant = Variant::kFull;
  std::uint64_t seed = 0;
  double micro_f1 = 0.0;
  double macro_f1 = 0.0;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double seconds = 0.0;
};

struct AblationSummary {
  Variant variant = Variant::kFull;
  std::size_t runs = 0;
  double micro_mean = 0.0;
  double micro_std = 0.0;  // sample standard deviation; 0 for a single run
  double macro_mean = 0.0;
  double macro_std = 0.0;
};

struct AblationResult {
  std::vector<AblationRun> runs;           // seed-major, variants in fixed order
  std::vector<AblationSummary> summaries;  // one per variant
  double seconds = 0.0;
};

/// For each seed the task is regenerated with that seed, and every variant
/// is built and trained with it. `settings.model.variant` is ignored.
AblationResult run_ablation(const TaskSpec& task, const RunSettings& settings,
                            std::span<const std::uint64_t> seeds,
                            const std::function<void(const AblationRun&)>& on_run = {});

std::vector<AblationSummary> summarize(std::span<const AblationRun> runs);

/// variant,seed,micro_f1,macro_f1,best_epoch,epochs_run
std::string runs_csv(std::span<const AblationRun> runs);
/// variant,runs,micro_mean,micro_std,macro_mean,macro_std
std::string summary_csv(std::span<const AblationSummary> summaries);
/// Aligned "variant  micro mean ± std  macro mean ± std" table.
std::string format_summary(std::span<const AblationSummary> summaries);

}  // namespace graphfuse
