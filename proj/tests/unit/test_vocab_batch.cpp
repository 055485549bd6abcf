// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "graphfuse/batch.hpp"
#include "graphfuse/errors.hpp"
#include "graphfuse/vocab.hpp"

using namespace graphfuse;

namespace {

Sentence sentence(std::vector<std::string> tokens, std::vector<std::string> labels) {
  return Sentence{std::move(tokens), std::move(labels)};
}

Corpus five_sentences() {
  return {sentence({"a", "b"}, {"O", "B-LOC"}), sentence({"c"}, {"O"}),
          sentence({"d", "e", "f"}, {"B-LOC", "I-LOC", "O"}), sentence({"g"}, {"O"}),
          sentence({"h", "i"}, {"O", "O"})};
}

}  // namespace

TEST_CASE("label vocab: three labels give three ids") {
  const Corpus c{sentence({"x", "y", "z"}, {"O", "B-LOC", "I-LOC"})};
  const LabelVocab v = LabelVocab::build(c);
  CHECK(v.size() == 3);
  std::set<int> ids;
  for (const auto& l : {"O", "B-LOC", "I-LOC"}) ids.insert(v.id(l));
  CHECK(ids == std::set<int>{0, 1, 2});
  CHECK(v.entity_types() == std::vector<std::string>{"LOC"});
}

TEST_CASE("label vocab: ids follow first appearance and the label set ignores order") {
  Corpus c = five_sentences();
  const LabelVocab forward = LabelVocab::build(c);
  CHECK(forward.labels() == std::vector<std::string>{"O", "B-LOC", "I-LOC"});
  std::reverse(c.begin(), c.end());
  const LabelVocab reversed = LabelVocab::build(c);
  std::vector<std::string> a = forward.labels(), b = reversed.labels();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  CHECK(a == b);
}

TEST_CASE("label vocab: ignore label is skipped and O is always present") {
  const LabelVocab v = LabelVocab::build({sentence({"a", "b"}, {"B-X", "-100"})});
  CHECK(v.labels() == std::vector<std::string>{"B-X", "O"});
  CHECK(v.id("-100") == LabelVocab::kIgnoreId);
  CHECK_FALSE(v.find("-100").has_value());
}

TEST_CASE("label vocab: errors") {
  CHECK_THROWS_AS(LabelVocab::build({}), ConfigError);
  const LabelVocab v = LabelVocab::build(five_sentences());
  try {
    v.id("B-PER");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("B-PER") != std::string::npos);
  }
  CHECK_THROWS_AS(v.label(3), ContractError);
  CHECK_THROWS_AS(LabelVocab({"O", "O"}), ConfigError);
}

TEST_CASE("label vocab: json round trip") {
  const LabelVocab v = LabelVocab::build(five_sentences());
  const auto j = v.to_json();
  CHECK(j.at("I-LOC").get<int>() == 2);
  CHECK(LabelVocab::from_json(j) == v);
  CHECK_THROWS_AS(LabelVocab::from_json(nlohmann::json{{"O", 0}, {"B-X", 2}}), DataError);
}

TEST_CASE("token vocab: reserved ids and unknown tokens") {
  const TokenVocab v = TokenVocab::build(five_sentences());
  CHECK(v.token(TokenVocab::kPadId) == "<pad>");
  CHECK(v.token(TokenVocab::kUnkId) == "<unk>");
  CHECK(v.size() == 2 + 9);
  CHECK(v.id("a") == 2);
  CHECK(v.id("never-seen") == TokenVocab::kUnkId);
  CHECK(TokenVocab(v.tokens()) == v);
  CHECK_THROWS_AS(TokenVocab({"a", "<unk>"}), ConfigError);
  CHECK_THROWS_AS(TokenVocab({"<pad>", "<unk>", "a", "a"}), ConfigError);
}

TEST_CASE("batches: five sentences with batch size two give 2, 2, 1") {
  const Corpus c = five_sentences();
  const TokenVocab tv = TokenVocab::build(c);
  const LabelVocab lv = LabelVocab::build(c);
  const auto batches = make_batches(c, 2, 128, tv, &lv);
  REQUIRE(batches.size() == 3);
  CHECK(batches[0].batch_size == 2);
  CHECK(batches[1].batch_size == 2);
  CHECK(batches[2].batch_size == 1);
  CHECK(batches[1].sentence_index == std::vector<std::size_t>{2, 3});
}

TEST_CASE("batches: padding carries the pad id, mask 0 and the ignore id") {
  const Corpus c = five_sentences();
  const TokenVocab tv = TokenVocab::build(c);
  const LabelVocab lv = LabelVocab::build(c);
  const Batch b = make_batches(c, 2, 128, tv, &lv)[1];  // lengths 3 and 1
  CHECK(b.max_len == 3);
  CHECK(b.lengths == std::vector<std::size_t>{3, 1});
  for (std::size_t col = 0; col < 3; ++col) CHECK(b.attention_mask[b.at(0, col)] == 1);
  CHECK(b.attention_mask[b.at(1, 0)] == 1);
  for (std::size_t col = 1; col < 3; ++col) {
    CHECK(b.attention_mask[b.at(1, col)] == 0);
    CHECK(b.token_ids[b.at(1, col)] == TokenVocab::kPadId);
    CHECK(b.label_ids[b.at(1, col)] == LabelVocab::kIgnoreId);
  }
  CHECK(b.token_ids[b.at(0, 1)] == tv.id("e"));
  CHECK(b.label_ids[b.at(0, 1)] == lv.id("I-LOC"));
}

TEST_CASE("batches: long sentences are truncated to max_len") {
  Sentence s;
  for (int i = 0; i < 200; ++i) {
    s.tokens.push_back("t" + std::to_string(i));
    s.labels.push_back("O");
  }
  const Corpus c{s};
  const TokenVocab tv = TokenVocab::build(c);
  const LabelVocab lv = LabelVocab::build(c);
  const Batch b = make_batches(c, 16, 128, tv, &lv).at(0);
  CHECK(b.max_len == 128);
  CHECK(b.lengths[0] == 128);
  CHECK(b.token_ids.size() == 128);
  CHECK(b.token_ids[127] == tv.id("t127"));
}

TEST_CASE("batches: without labels every position is ignored") {
  const Corpus c = five_sentences();
  const TokenVocab tv = TokenVocab::build(c);
  for (const Batch& b : make_batches(c, 4, 128, tv, nullptr))
    for (int id : b.label_ids) CHECK(id == LabelVocab::kIgnoreId);
}

TEST_CASE("batches: shuffling permutes sentences reproducibly") {
  Corpus c;
  for (int i = 0; i < 20; ++i) c.push_back(sentence({"w" + std::to_string(i)}, {"O"}));
  const TokenVocab tv = TokenVocab::build(c);
  const LabelVocab lv = LabelVocab::build(c);
  auto order = [&](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::size_t> out;
    for (const Batch& b : make_batches(c, 3, 8, tv, &lv, &rng))
      out.insert(out.end(), b.sentence_index.begin(), b.sentence_index.end());
    return out;
  };
  const auto a = order(5);
  CHECK(a == order(5));
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
  std::vector<std::size_t> identity(20);
  for (std::size_t i = 0; i < 20; ++i) identity[i] = i;
  CHECK(a != identity);
}

TEST_CASE("batches: invalid sizes and empty sentences are rejected") {
  const Corpus c = five_sentences();
  const TokenVocab tv = TokenVocab::build(c);
  const LabelVocab lv = LabelVocab::build(c);
  CHECK_THROWS_AS(make_batches(c, 0, 8, tv, &lv), ConfigError);
  CHECK_THROWS_AS(make_batches(c, 2, 0, tv, &lv), ConfigError);
  CHECK_THROWS_AS(make_batches({Sentence{}}, 2, 8, tv, &lv), DataError);
  CHECK(make_batches({}, 2, 8, tv, &lv).empty());
}
