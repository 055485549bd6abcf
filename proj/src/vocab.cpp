// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/vocab.hpp"

#include <algorithm>

#include "graphfuse/errors.hpp"

namespace graphfuse {

LabelVocab::LabelVocab(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] == kIgnoreLabel) throw ConfigError("the ignore label cannot be a vocab entry");
    if (!index_.emplace(labels_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate label in vocabulary: " + labels_[i]);
    }
  }
}

LabelVocab LabelVocab::build(const Corpus& corpus) {
  if (corpus.empty()) throw ConfigError("cannot build a label vocabulary from an empty corpus");
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> seen;
  for (const Sentence& s : corpus) {
    for (const std::string& l : s.labels) {
      if (l == kIgnoreLabel) continue;
      if (seen.emplace(l, 0).second) labels.push_back(l);
    }
  }
  if (!seen.contains("O")) labels.emplace_back("O");
  return LabelVocab(std::move(labels));
}

std::optional<int> LabelVocab::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LabelVocab::id(std::string_view label) const {
  if (label == kIgnoreLabel) return kIgnoreId;
  if (auto found = find(label)) return *found;
  throw DataError("label '" + std::string(label) + "' is not in the model's label vocabulary");
}

const std::string& LabelVocab::label(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= labels_.size()) {
    throw ContractError("label id " + std::to_string(id) + " out of range");
  }
  return labels_[static_cast<std::size_t>(id)];
}

std::vector<std::string> LabelVocab::entity_types() const {
  std::vector<std::string> types;
  for (const std::string& l : labels_) {
    if (l == "O") continue;
    std::string t = l.substr(2);
    if (std::find(types.begin(), types.end(), t) == types.end()) types.push_back(std::move(t));
  }
  return types;
}

nlohmann::json LabelVocab::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < labels_.size(); ++i) j[labels_[i]] = i;
  return j;
}

LabelVocab LabelVocab::from_json(const nlohmann::json& j) {
  std::vector<std::string> labels(j.size());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto id = it.value().get<std::size_t>();
    if (id >= labels.size() || !labels[id].empty()) {
      throw DataError("label vocabulary ids must be a permutation of 0..n-1");
    }
    labels[id] = it.key();
  }
  return LabelVocab(std::move(labels));
}

TokenVocab::TokenVocab()
    : TokenVocab(std::vector<std::string>{std::string(kPadToken), std::string(kUnkToken)}) {}

TokenVocab::TokenVocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < 2 || tokens_[kPadId] != kPadToken || tokens_[kUnkId] != kUnkToken) {
    throw ConfigError("token vocabulary must start with <pad>, <unk>");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) {
      throw ConfigError("duplicate token in vocabulary: " + tokens_[i]);
    }
  }
}

TokenVocab TokenVocab::build(const Corpus& train) {
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken)};
  std::unordered_map<std::string, std::size_t> seen{{tokens[0], 0}, {tokens[1], 1}};
  for (const Sentence& s : train)
    for (const std::string& t : s.tokens)
      if (seen.emplace(t, tokens.size()).second) tokens.push_back(t);
  return TokenVocab(std::move(tokens));
}

std::size_t TokenVocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnkId : it->second;
}

}  // namespace graphfuse
