// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "graphfuse/conll.hpp"

namespace graphfuse {

/// Label <-> id map. Ids follow first appearance; "O" is appended if the
/// corpus never uses it. The ignore id never names a real label.
class LabelVocab {
 public:
  static constexpr int kIgnoreId = -100;

  LabelVocab() = default;
  explicit LabelVocab(std::vector<std::string> labels);

  /// ConfigError on an empty corpus.
  static LabelVocab build(const Corpus& corpus);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<int> find(std::string_view label) const;
  /// "-100" maps to kIgnoreId; unknown labels throw DataError naming them.
  int id(std::string_view label) const;
  const std::string& label(int id) const;
  /// Entity types in order of first appearance (B-X / I-X -> X).
  std::vector<std::string> entity_types() const;

  /// {label: id}
  nlohmann::json to_json() const;
  static LabelVocab from_json(const nlohmann::json& j);

  bool operator==(const LabelVocab& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

/// Surface-token vocabulary built from a training split. Id 0 is padding,
/// id 1 the unknown token.
class TokenVocab {
 public:
  static constexpr std::size_t kPadId = 0;
  static constexpr std::size_t kUnkId = 1;
  static constexpr std::string_view kPadToken = "<pad>";
  static constexpr std::string_view kUnkToken = "<unk>";

  TokenVocab();
  explicit TokenVocab(std::vector<std::string> tokens);

  static TokenVocab build(const Corpus& train);

  std::size_t size() const { return tokens_.size(); }
  std::size_t id(std::string_view token) const;
  const std::string& token(std::size_t id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  bool operator==(const TokenVocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace graphfuse
