// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/ablation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "graphfuse/errors.hpp"
#include "graphfuse/inference.hpp"
#include "graphfuse/trainer.hpp"
#include "graphfuse/vocab.hpp"

namespace graphfuse {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void mean_std(const std::vector<double>& xs, double& mean, double& std) {
  mean = 0.0;
  std = 0.0;
  if (xs.empty()) return;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) return;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

AblationResult run_ablation(const TaskSpec& task, const RunSettings& settings,
                            std::span<const std::uint64_t> seeds,
                            const std::function<void(const AblationRun&)>& on_run) {
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  const auto start = Clock::now();
  AblationResult result;
  for (std::uint64_t seed : seeds) {
    TaskSpec spec = task;
    spec.seed = seed;
    const SyntheticData data = generate(spec);
    const TokenVocab tokens = TokenVocab::build(data.train);
    const LabelVocab labels = LabelVocab::build(data.train);

    for (Variant variant : kAblationVariants) {
      const auto run_start = Clock::now();
      ModelConfig mc = settings.model;
      mc.vocab_size = tokens.size();
      mc.num_labels = labels.size();
      mc.variant = variant;
      TrainConfig tc = settings.train;
      tc.seed = seed;

      TextGraphModel model(mc, seed);
      const TrainResult trained = train(model, data.train, data.valid, tokens, labels, tc);
      const EvalReport report = evaluate(model, data.test, tokens, labels, tc.batch_size,
                                         tc.max_len, eval_threads());
      AblationRun run{variant,
                      seed,
                      report.micro.f1,
                      report.macro.f1,
                      trained.best_epoch,
                      trained.history.size(),
                      seconds_since(run_start)};
      result.runs.push_back(run);
      if (on_run) on_run(run);
    }
  }
  result.summaries = summarize(result.runs);
  result.seconds = seconds_since(start);
  return result;
}

std::vector<AblationSummary> summarize(std::span<const AblationRun> runs) {
  std::vector<AblationSummary> out;
  for (Variant variant : kAblationVariants) {
    std::vector<double> micro, macro;
    for (const AblationRun& r : runs) {
      if (r.variant != variant) continue;
      micro.push_back(r.micro_f1);
      macro.push_back(r.macro_f1);
    }
    AblationSummary s;
    s.variant = variant;
    s.runs = micro.size();
    mean_std(micro, s.micro_mean, s.micro_std);
    mean_std(macro, s.macro_mean, s.macro_std);
    out.push_back(s);
  }
  return out;
}

std::string runs_csv(std::span<const AblationRun> runs) {
  std::string out = "variant,seed,micro_f1,macro_f1,best_epoch,epochs_run\n";
  for (const AblationRun& r : runs) {
    out += std::string(variant_name(r.variant)) + ',' + std::to_string(r.seed) + ',' +
           fixed(r.micro_f1, 6) + ',' + fixed(r.macro_f1, 6) + ',' +
           std::to_string(r.best_epoch) + ',' + std::to_string(r.epochs_run) + '\n';
  }
  return out;
}

std::string summary_csv(std::span<const AblationSummary> summaries) {
  std::string out = "variant,runs,micro_mean,micro_std,macro_mean,macro_std\n";
  for (const AblationSummary& s : summaries) {
    out += std::string(variant_name(s.variant)) + ',' + std::to_string(s.runs) + ',' +
           fixed(s.micro_mean, 6) + ',' + fixed(s.micro_std, 6) + ',' + fixed(s.macro_mean, 6) +
           ',' + fixed(s.macro_std, 6) + '\n';
  }
  return out;
}

std::string format_summary(std::span<const AblationSummary> summaries) {
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %5s  %-18s  %-18s\n", "Variant", "Runs", "Micro-F1",
                "Macro-F1");
  std::string out = line;
  for (const AblationSummary& s : summaries) {
    const std::string micro = fixed(s.micro_mean) + " ± " + fixed(s.micro_std);
    const std::string macro = fixed(s.macro_mean) + " ± " + fixed(s.macro_std);
    // "±" is two bytes in UTF-8; pad by hand so columns line up.
    std::snprintf(line, sizeof line, "%-8s %5zu  %-19s  %-19s\n",
                  std::string(variant_name(s.variant)).c_str(), s.runs, micro.c_str(),
                  macro.c_str());
    out += line;
  }
  return out;
}

}  // namespace graphfuse
