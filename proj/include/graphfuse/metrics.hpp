// SPDX-License-Identifier: Apache-2.0
//
// Exact-match span scoring over BIO label sequences.

#pragma once

#include <compare>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace graphfuse {

struct Span {
  std::string type;
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  auto operator<=>(const Span&) const = default;
};

/// B-T opens a span, contiguous I-T extends it, anything else closes it.
/// An I-T without an open span of type T starts a new span.
std::vector<Span> extract_spans(std::span<const std::string> labels);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// F1 is 0 when precision + recall is 0.
Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct EntityScore {
  std::string type;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  Prf prf;

  std::size_t support() const { return tp + fn; }
};

struct EvalReport {
  std::vector<EntityScore> entities;  // sorted by type name
  Prf micro;
  Prf macro;  // mean over types with gold support
  double token_accuracy = 0.0;
  std::size_t tokens = 0;
  std::size_t gold_spans = 0;
  std::size_t pred_spans = 0;
};

/// Positions whose gold label is "-100" are dropped from both sequences
/// before spans are extracted. DimensionError if the shapes differ.
EvalReport score(const std::vector<std::vector<std::string>>& gold,
                 const std::vector<std::vector<std::string>>& pred);

nlohmann::json to_json(const EvalReport& report);
/// Aligned plain-text table: one row per entity type, then micro/macro.
std::string format_table(const EvalReport& report);

}  // namespace graphfuse
