// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include "graphfuse/ablation.hpp"
#include "graphfuse/checkpoint.hpp"
#include "graphfuse/config.hpp"
#include "graphfuse/conll.hpp"
#include "graphfuse/errors.hpp"
#include "graphfuse/inference.hpp"
#include "graphfuse/synth.hpp"
#include "graphfuse/trainer.hpp"

namespace graphfuse {
namespace {

namespace fs = std::filesystem;

struct SettingFlags {
  std::optional<std::string> preset;
  std::optional<std::string> config;
  Overrides overrides;

  RunSettings resolve(const std::optional<std::string>& fallback_preset = std::nullopt) const {
    return resolve_settings(preset ? preset : fallback_preset, config, overrides);
  }
};

void add_setting_flags(CLI::App* cmd, SettingFlags& f) {
  cmd->add_option("--preset", f.preset, "Named hyperparameter preset");
  cmd->add_option("--config", f.config, "JSON config file {\"model\":{}, \"train\":{}}");
  cmd->add_option("--variant", f.overrides.variant, "encoder, gat or full");
  cmd->add_option("--seed", f.overrides.seed, "Seed for initialization, shuffling, dropout");
  cmd->add_option("--epochs", f.overrides.epochs, "Maximum training epochs");
  cmd->add_option("--lr", f.overrides.learning_rate, "Peak learning rate");
  cmd->add_option("--batch-size", f.overrides.batch_size, "Sentences per batch");
  cmd->add_option("--max-len", f.overrides.max_len, "Tokens kept per sentence");
  cmd->add_option("--heads", f.overrides.heads, "GAT attention heads");
  cmd->add_option("--hidden", f.overrides.hidden, "GAT hidden width");
}

struct TaskFlags {
  std::string task = "relational";
  std::optional<std::size_t> train_size, valid_size, test_size;

  TaskSpec spec() const {
    TaskSpec s = default_task_spec(parse_task(task));
    if (train_size) s.train_size = *train_size;
    if (valid_size) s.valid_size = *valid_size;
    if (test_size) s.test_size = *test_size;
    return s;
  }
};

void add_task_flags(CLI::App* cmd, TaskFlags& f) {
  cmd->add_option("--task", f.task, "copy, window or relational")->capture_default_str();
  cmd->add_option("--train-size", f.train_size, "Training sentences");
  cmd->add_option("--valid-size", f.valid_size, "Validation sentences");
  cmd->add_option("--test-size", f.test_size, "Test sentences");
}

Corpus read_nonempty(const std::string& path, const char* role) {
  Corpus corpus = read_conll_file(path);
  if (corpus.empty()) throw DataError(std::string(role) + " file " + path + " has no sentences");
  return corpus;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir + ": " + ec.message());
}

std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

int cmd_train(const std::string& train_path, const std::string& valid_path,
              const std::string& out_dir, const SettingFlags& flags, std::ostream& out) {
  RunSettings settings = flags.resolve();
  const Corpus train_set = read_nonempty(train_path, "training");
  const Corpus valid_set = read_nonempty(valid_path, "validation");
  const TokenVocab tokens = TokenVocab::build(train_set);
  const LabelVocab labels = LabelVocab::build(train_set);
  settings.model.vocab_size = tokens.size();
  settings.model.num_labels = labels.size();

  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  std::ofstream history(dir / "history.jsonl", std::ios::binary);
  if (!history) throw DataError("cannot write " + (dir / "history.jsonl").string());

  TextGraphModel model(settings.model, settings.train.seed);
  const TrainResult result =
      train(model, train_set, valid_set, tokens, labels, settings.train,
            [&](const EpochRecord& r) {
              history << to_json(r).dump() << '\n';
              history.flush();
              out << "epoch " << r.epoch << "  loss " << fmt4(r.train_loss) << "  micro-F1 "
                  << fmt4(r.micro_f1) << "  macro-F1 " << fmt4(r.macro_f1) << '\n';
            });

  save_checkpoint((dir / "model.ckpt").string(), model, settings.train, tokens, labels);
  write_text_file(dir / "config.json", to_json(settings).dump(2) + "\n");
  write_text_file(dir / "labels.json", labels.to_json().dump(2) + "\n");
  out << "best micro-F1 " << fmt4(result.best_micro_f1) << " at epoch " << result.best_epoch
      << " (" << result.history.size() << " epochs, " << result.steps << " steps)\n";
  return kExitOk;
}

int cmd_eval(const std::string& ckpt_path, const std::string& test_path,
             const std::optional<std::string>& out_dir, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Corpus test_set = read_nonempty(test_path, "test");
  const EvalReport report = evaluate(ckpt.model, test_set, ckpt.tokens, ckpt.labels,
                                     ckpt.train.batch_size, ckpt.train.max_len, eval_threads());
  const std::string table = format_table(report);
  if (out_dir) {
    ensure_dir(*out_dir);
    write_text_file(fs::path(*out_dir) / "report.json", to_json(report).dump(2) + "\n");
    write_text_file(fs::path(*out_dir) / "report.txt", table);
  }
  out << table;
  return kExitOk;
}

int cmd_predict(const std::string& ckpt_path, const std::string& input_path,
                const std::optional<std::string>& output_path,
                const std::optional<std::size_t>& batch_size, std::ostream& out) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const auto sentences = parse_tokens(read_text_file(input_path));
  const std::size_t bs = batch_size.value_or(ckpt.train.batch_size);
  if (bs == 0) throw ConfigError("--batch-size must be >= 1");
  const auto predicted = predict_labels(ckpt.model, sentences, ckpt.tokens, ckpt.labels, bs,
                                        ckpt.train.max_len, eval_threads());
  Corpus corpus;
  corpus.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) corpus.push_back({sentences[i], predicted[i]});
  const std::string text = serialize_conll(corpus);
  if (output_path) {
    write_text_file(*output_path, text);
  } else {
    out << text;
  }
  return kExitOk;
}

int cmd_generate(const TaskFlags& task, std::uint64_t seed, const std::string& out_dir,
                 std::ostream& out) {
  TaskSpec spec = task.spec();
  spec.seed = seed;
  const SyntheticData data = generate(spec);
  ensure_dir(out_dir);
  const fs::path dir(out_dir);
  write_text_file(dir / "train.conll", serialize_conll(data.train));
  write_text_file(dir / "valid.conll", serialize_conll(data.valid));
  write_text_file(dir / "test.conll", serialize_conll(data.test));
  out << "wrote " << data.train.size() << "/" << data.valid.size() << "/" << data.test.size()
      << " " << task_name(spec.kind) << " sentences to " << out_dir << '\n';
  return kExitOk;
}

int cmd_ablate(const TaskFlags& task, const std::vector<std::uint64_t>& seeds,
               const std::string& out_dir, const SettingFlags& flags, std::ostream& out) {
  const bool configured = flags.preset || flags.config;
  const RunSettings settings = flags.resolve(configured ? std::nullopt
                                                        : std::optional<std::string>("relational"));
  ensure_dir(out_dir);
  const AblationResult result =
      run_ablation(task.spec(), settings, seeds, [&](const AblationRun& r) {
        out << variant_name(r.variant) << " seed " << r.seed << "  micro-F1 " << fmt4(r.micro_f1)
            << "  macro-F1 " << fmt4(r.macro_f1) << "  epochs " << r.epochs_run << '\n';
      });
  const fs::path dir(out_dir);
  write_text_file(dir / "ablation.csv", runs_csv(result.runs));
  write_text_file(dir / "summary.csv", summary_csv(result.summaries));
  out << format_summary(result.summaries);
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.1f", result.seconds);
  out << "total " << secs << " s\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Token classification with graph attention over fully connected token graphs",
               "graphfuse"};
  app.require_subcommand(1);

  SettingFlags train_flags;
  std::string train_path, valid_path, train_out;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model and write a checkpoint");
  train_cmd->add_option("--train", train_path, "Training CoNLL file")->required();
  train_cmd->add_option("--valid", valid_path, "Validation CoNLL file")->required();
  train_cmd->add_option("--out", train_out, "Output directory")->required();
  add_setting_flags(train_cmd, train_flags);

  std::string eval_ckpt, eval_test;
  std::optional<std::string> eval_out;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a labeled file");
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
  eval_cmd->add_option("--test", eval_test, "Labeled CoNLL file")->required();
  eval_cmd->add_option("--out", eval_out, "Directory for report.json and report.txt");

  std::string pred_ckpt, pred_input;
  std::optional<std::string> pred_output;
  std::optional<std::size_t> pred_batch;
  CLI::App* pred_cmd = app.add_subcommand("predict", "Label a token file");
  pred_cmd->add_option("--checkpoint", pred_ckpt, "Checkpoint file")->required();
  pred_cmd->add_option("--input", pred_input, "Tokens, one per line, blank between sentences")
      ->required();
  pred_cmd->add_option("--output", pred_output, "Output CoNLL file (default: stdout)");
  pred_cmd->add_option("--batch-size", pred_batch, "Sentences per batch");

  TaskFlags gen_task;
  gen_task.task = "copy";
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  CLI::App* gen_cmd = app.add_subcommand("generate", "Write a synthetic train/valid/test split");
  add_task_flags(gen_cmd, gen_task);
  gen_cmd->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Output directory")->required();

  TaskFlags abl_task;
  SettingFlags abl_flags;
  std::vector<std::uint64_t> abl_seeds{1, 2, 3, 4, 5};
  std::string abl_out;
  CLI::App* abl_cmd = app.add_subcommand("ablate", "Run every variant over several seeds");
  add_task_flags(abl_cmd, abl_task);
  abl_cmd->add_option("--seeds", abl_seeds, "Comma-separated seeds")
      ->delimiter(',')
      ->capture_default_str();
  abl_cmd->add_option("--out", abl_out, "Output directory")->required();
  add_setting_flags(abl_cmd, abl_flags);

  std::vector<std::string> argv_storage{"graphfuse"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train_path, valid_path, train_out, train_flags, out);
    if (*eval_cmd) return cmd_eval(eval_ckpt, eval_test, eval_out, out);
    if (*pred_cmd) return cmd_predict(pred_ckpt, pred_input, pred_output, pred_batch, out);
    if (*gen_cmd) return cmd_generate(gen_task, gen_seed, gen_out, out);
    if (*abl_cmd) return cmd_ablate(abl_task, abl_seeds, abl_out, abl_flags, out);
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace graphfuse
