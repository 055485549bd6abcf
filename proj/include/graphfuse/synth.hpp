// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic labeling tasks.
//
//   copy      label is a fixed function of the token id
//   window    label depends on the previous token (and the current one)
//   relational-match
//             a key token is labeled B-MATCH iff the same token occurs
//             elsewhere in the sentence; matched pairs sit >= min_gap apart,
//             so no short window around a token decides its label

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphfuse/conll.hpp"

namespace graphfuse {

enum class TaskKind { kCopy, kWindow, kRelationalMatch };

std::string_view task_name(TaskKind kind);
/// "copy", "window", "relational" (also "relational-match").
TaskKind parse_task(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::kCopy;
  std::size_t vocab_size = 40;
  std::size_t min_len = 6;
  std::size_t max_len = 14;
  std::size_t num_types = 3;  // copy/window entity types
  std::uint64_t seed = 1;
  std::size_t train_size = 500;
  std::size_t valid_size = 100;
  std::size_t test_size = 200;
  // relational-match only
  std::size_t key_count = 2;  // tokens k0..k{key_count-1}; the rest are unique fillers
  std::size_t min_gap = 20;
  std::size_t max_pairs = 1;
  std::size_t max_singles = 1;
};

/// Defaults tuned per task (relational-match uses longer sentences).
TaskSpec default_task_spec(TaskKind kind);

struct SyntheticData {
  Corpus train;
  Corpus valid;
  Corpus test;
};

/// Pure function of `spec`. Splits are disjoint at the sentence level.
/// ConfigError for unsatisfiable specs (empty splits, too-short sentences).
SyntheticData generate(const TaskSpec& spec);

/// The labeling rule of `spec.kind` applied to a token sequence.
std::vector<std::string> derive_labels(const TaskSpec& spec,
                                       const std::vector<std::string>& tokens);

}  // namespace graphfuse
