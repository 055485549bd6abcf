// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "graphfuse/checkpoint.hpp"
#include "graphfuse/errors.hpp"
#include "graphfuse/inference.hpp"
#include "graphfuse/synth.hpp"
#include "helpers.hpp"

using namespace graphfuse;

namespace {

struct Trained {
  SyntheticData data;
  TokenVocab tokens;
  LabelVocab labels;
  TrainConfig train;
  TextGraphModel model;
};

Trained make_trained() {
  TaskSpec spec = default_task_spec(TaskKind::kCopy);
  spec.train_size = 30;
  spec.valid_size = 10;
  spec.test_size = 10;
  SyntheticData data = generate(spec);
  TokenVocab tv = TokenVocab::build(data.train);
  LabelVocab lv = LabelVocab::build(data.train);
  ModelConfig mc = testing::tiny_model_config(tv.size(), lv.size());
  mc.enc_window = 2;
  TrainConfig tc;
  tc.epochs = 1;
  tc.learning_rate = 1e-2;
  TextGraphModel model(mc, 4);
  train(model, data.train, data.valid, tv, lv, tc);
  return Trained{std::move(data), std::move(tv), std::move(lv), tc, std::move(model)};
}

std::string serialized(const Trained& t) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, t.model, t.train, t.tokens, t.labels);
  return out.str();
}

Checkpoint parse(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_checkpoint(in);
}

}  // namespace

TEST_CASE("checkpoint: round trip restores every field bit for bit") {
  const Trained t = make_trained();
  const std::string bytes = serialized(t);
  CHECK(bytes.substr(0, 8) == std::string("GFCKPT\0\1", 8));
  const Checkpoint c = parse(bytes);
  CHECK(c.tokens == t.tokens);
  CHECK(c.labels == t.labels);
  CHECK(c.train.learning_rate == t.train.learning_rate);
  CHECK(c.model.config().enc_window == 2);
  const auto& a = t.model.params().params();
  const auto& b = c.model.params().params();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    const auto x = a[i].value.data();
    const auto y = b[i].value.data();
    CHECK(std::equal(x.begin(), x.end(), y.begin()));
  }
  CHECK(serialized(Trained{t.data, c.tokens, c.labels, c.train,
                           TextGraphModel(c.model.config(), 0)}) != bytes);
}

TEST_CASE("checkpoint: reloaded model predicts identically") {
  const Trained t = make_trained();
  testing::TempDir dir;
  const std::string path = dir.file("m.ckpt");
  save_checkpoint(path, t.model, t.train, t.tokens, t.labels);
  const Checkpoint c = load_checkpoint(path);
  std::vector<std::vector<std::string>> sentences;
  for (const auto& s : t.data.test) sentences.push_back(s.tokens);
  CHECK(predict_labels(t.model, sentences, t.tokens, t.labels, 4, 64) ==
        predict_labels(c.model, sentences, c.tokens, c.labels, 4, 64));
  const EvalReport r1 = evaluate(t.model, t.data.test, t.tokens, t.labels, 4, 64);
  const EvalReport r2 = evaluate(c.model, t.data.test, c.tokens, c.labels, 4, 64);
  CHECK(to_json(r1).dump() == to_json(r2).dump());
}

TEST_CASE("checkpoint: corrupt inputs are data errors") {
  const Trained t = make_trained();
  const std::string bytes = serialized(t);
  CHECK_THROWS_AS(parse(""), DataError);
  CHECK_THROWS_AS(parse("NOTACKPT" + bytes.substr(8)), DataError);
  CHECK_THROWS_AS(parse(bytes.substr(0, bytes.size() - 5)), DataError);
  std::string bad_version = bytes;
  bad_version[8] = 9;
  CHECK_THROWS_AS(parse(bad_version), DataError);
  std::string bad_header = bytes;
  bad_header[20] = '#';
  CHECK_THROWS_AS(parse(bad_header), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/model.ckpt"), DataError);
}

TEST_CASE("checkpoint: a tensor index that disagrees with the config is rejected") {
  const Trained t = make_trained();
  std::string bytes = serialized(t);
  // Rename one stored tensor without touching the payload.
  const auto at = bytes.find("\"gat.weight\"");
  REQUIRE(at != std::string::npos);
  bytes.replace(at, 12, "\"gat.wEight\"");
  try {
    parse(bytes);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("gat.w") != std::string::npos);
  }
}
