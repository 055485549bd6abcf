// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "graphfuse/cli.hpp"
#include "graphfuse/conll.hpp"
#include "helpers.hpp"

using namespace graphfuse;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// Generates a small copy split and trains on it once per test binary.
struct Workspace {
  testing::TempDir dir;
  std::string data, model;

  Workspace() {
    data = dir.file("data");
    model = dir.file("model");
    REQUIRE(run({"generate", "--task", "copy", "--seed", "3", "--train-size", "40", "--valid-size",
                 "10", "--test-size", "12", "--out", data})
                .code == 0);
    const Result r = run({"train", "--train", data + "/train.conll", "--valid",
                          data + "/valid.conll", "--out", model, "--preset", "copy", "--epochs",
                          "2", "--seed", "5"});
    INFO(r.err);
    REQUIRE(r.code == 0);
  }
};

Workspace& workspace() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("cli: help succeeds and unknown subcommands or flags are usage errors") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"train", "--bogus"}).code == kExitUsage);
  CHECK(run({"eval", "--test", "x"}).code == kExitUsage);  // --checkpoint missing
}

TEST_CASE("cli: train writes its artifacts") {
  Workspace& w = workspace();
  for (const char* f : {"model.ckpt", "history.jsonl", "config.json", "labels.json"})
    CHECK(std::filesystem::exists(w.model + "/" + f));
  const std::string history = read_text_file(w.model + "/history.jsonl");
  CHECK(std::count(history.begin(), history.end(), '\n') == 2);
  CHECK(history.find("\"micro_f1\"") != std::string::npos);
}

TEST_CASE("cli: eval prints and writes a report") {
  Workspace& w = workspace();
  const std::string out = w.dir.file("report");
  const Result r = run({"eval", "--checkpoint", w.model + "/model.ckpt", "--test",
                        w.data + "/test.conll", "--out", out});
  CHECK(r.code == 0);
  CHECK(r.out.find("Micro avg") != std::string::npos);
  CHECK(std::filesystem::exists(out + "/report.json"));
  CHECK(std::filesystem::exists(out + "/report.txt"));
}

TEST_CASE("cli: data problems map to exit code 2") {
  Workspace& w = workspace();
  const std::string ckpt = w.model + "/model.ckpt";
  Result r = run({"eval", "--checkpoint", ckpt, "--test", w.dir.file("missing.conll")});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("missing.conll") != std::string::npos);

  const std::string empty = w.dir.file("empty.conll");
  write_text_file(empty, "");
  CHECK(run({"eval", "--checkpoint", ckpt, "--test", empty}).code == kExitUsage);

  const std::string unknown = w.dir.file("unknown.conll");
  write_text_file(unknown, "w1 B-NEVERSEEN\n");
  r = run({"eval", "--checkpoint", ckpt, "--test", unknown});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("B-NEVERSEEN") != std::string::npos);

  const std::string malformed = w.dir.file("bad.conll");
  write_text_file(malformed, "a O\nb\n");
  r = run({"train", "--train", malformed, "--valid", malformed, "--out", w.dir.file("x")});
  CHECK(r.code == kExitUsage);
  CHECK(r.err.find("line 2") != std::string::npos);

  CHECK(run({"eval", "--checkpoint", w.data + "/test.conll", "--test", w.data + "/test.conll"})
            .code == kExitUsage);
  CHECK(run({"train", "--train", w.data + "/train.conll", "--valid", w.data + "/valid.conll",
             "--out", w.dir.file("y"), "--preset", "nope"})
            .code == kExitUsage);
}

TEST_CASE("cli: predictions do not depend on the batch size") {
  Workspace& w = workspace();
  const std::string ckpt = w.model + "/model.ckpt";
  const std::string input = w.data + "/test.conll";
  const Result a = run({"predict", "--checkpoint", ckpt, "--input", input, "--batch-size", "1"});
  const Result b = run({"predict", "--checkpoint", ckpt, "--input", input, "--batch-size", "7"});
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  const Corpus predicted = parse_conll(a.out);
  const Corpus gold = read_conll_file(input);
  REQUIRE(predicted.size() == gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) CHECK(predicted[i].tokens == gold[i].tokens);

  const std::string file = w.dir.file("pred.conll");
  CHECK(run({"predict", "--checkpoint", ckpt, "--input", input, "--output", file}).code == 0);
  CHECK(read_text_file(file) == a.out);
  CHECK(run({"predict", "--checkpoint", ckpt, "--input", input, "--batch-size", "0"}).code ==
        kExitUsage);
}

TEST_CASE("cli: training is reproducible for a fixed seed") {
  Workspace& w = workspace();
  const std::string again = w.dir.file("again");
  const Result r = run({"train", "--train", w.data + "/train.conll", "--valid",
                        w.data + "/valid.conll", "--out", again, "--preset", "copy", "--epochs",
                        "2", "--seed", "5"});
  REQUIRE(r.code == 0);
  CHECK(read_text_file(again + "/history.jsonl") == read_text_file(w.model + "/history.jsonl"));
  CHECK(read_text_file(again + "/model.ckpt") == read_text_file(w.model + "/model.ckpt"));
}

TEST_CASE("cli: generate is deterministic and ablate writes both tables") {
  testing::TempDir dir;
  const std::vector<std::string> gen{"generate", "--task", "window", "--seed", "9",
                                     "--train-size", "5", "--valid-size", "2", "--test-size",
                                     "2", "--out"};
  auto with = [](std::vector<std::string> v, std::string s) {
    v.push_back(std::move(s));
    return v;
  };
  REQUIRE(run(with(gen, dir.file("a"))).code == 0);
  REQUIRE(run(with(gen, dir.file("b"))).code == 0);
  CHECK(read_text_file(dir.file("a") + "/train.conll") == read_text_file(dir.file("b") + "/train.conll"));
  CHECK(run({"generate", "--task", "nope", "--out", dir.file("c")}).code == kExitUsage);

  const Result r = run({"ablate", "--task", "copy", "--preset", "copy", "--seeds", "1",
                        "--epochs", "1", "--train-size", "16", "--valid-size", "4",
                        "--test-size", "4", "--out", dir.file("abl")});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const std::string csv = read_text_file(dir.file("abl") + "/ablation.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  CHECK(std::filesystem::exists(dir.file("abl") + "/summary.csv"));
}
