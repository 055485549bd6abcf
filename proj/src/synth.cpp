// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/synth.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "graphfuse/errors.hpp"
#include "graphfuse/rng.hpp"

namespace graphfuse {
namespace {

std::size_t token_number(const std::string& token) {
  return static_cast<std::size_t>(std::stoul(token.substr(1)));
}

std::string word(std::size_t id) { return "w" + std::to_string(id); }
std::string key(std::size_t id) { return "k" + std::to_string(id); }

std::vector<std::string> sequential_tokens(const TaskSpec& spec, Rng& rng) {
  const std::size_t len = spec.min_len + rng.index(spec.max_len - spec.min_len + 1);
  std::vector<std::string> tokens(len);
  for (auto& t : tokens) t = word(rng.index(spec.vocab_size));
  return tokens;
}

// Returns an empty vector when random placement runs out of room.
std::vector<std::string> try_relational_tokens(const TaskSpec& spec, Rng& rng) {
  const std::size_t len = spec.min_len + rng.index(spec.max_len - spec.min_len + 1);
  std::vector<std::string> tokens(len);
  std::vector<bool> used(len, false);

  std::vector<std::size_t> keys(spec.key_count);
  std::iota(keys.begin(), keys.end(), 0);
  rng.shuffle(keys.begin(), keys.end());
  const std::size_t pairs = 1 + rng.index(spec.max_pairs);
  const std::size_t singles = 1 + rng.index(spec.max_singles);
  std::size_t next_key = 0;

  // Singles take one end of a gap-respecting position pair, so their
  // positions are distributed like those of matched tokens.
  auto position_pair = [&]() -> std::optional<std::pair<std::size_t, std::size_t>> {
    for (int attempt = 0; attempt < 4096; ++attempt) {
      const std::size_t a = rng.index(len);
      const std::size_t b = rng.index(len);
      if (!used[a] && !used[b] && (a > b ? a - b : b - a) >= spec.min_gap) return std::pair{a, b};
    }
    return std::nullopt;
  };
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto ab = position_pair();
    if (!ab) return {};
    used[ab->first] = used[ab->second] = true;
    tokens[ab->first] = tokens[ab->second] = key(keys[next_key++]);
  }
  for (std::size_t k = 0; k < singles; ++k) {
    const auto ab = position_pair();
    if (!ab) return {};
    const std::size_t p = rng.bernoulli(0.5) ? ab->first : ab->second;
    used[p] = true;
    tokens[p] = key(keys[next_key++]);
  }

  // Fillers never repeat within a sentence.
  const std::size_t filler_vocab = spec.vocab_size - spec.key_count;
  std::vector<std::size_t> fillers(filler_vocab);
  std::iota(fillers.begin(), fillers.end(), 0);
  rng.shuffle(fillers.begin(), fillers.end());
  std::size_t next_filler = 0;
  for (std::size_t p = 0; p < len; ++p)
    if (!used[p]) tokens[p] = word(fillers[next_filler++]);
  return tokens;
}

std::vector<std::string> relational_tokens(const TaskSpec& spec, Rng& rng) {
  for (;;) {
    auto tokens = try_relational_tokens(spec, rng);
    if (!tokens.empty()) return tokens;
  }
}

void check_spec(const TaskSpec& spec) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("task spec: " + msg);
  };
  require(spec.train_size >= 1 && spec.valid_size >= 1 && spec.test_size >= 1,
          "split sizes must be >= 1");
  require(spec.min_len >= 1 && spec.min_len <= spec.max_len, "need 1 <= min_len <= max_len");
  require(spec.vocab_size >= 1, "vocab_size must be >= 1");
  if (spec.kind != TaskKind::kRelationalMatch) {
    require(spec.num_types >= 1, "num_types must be >= 1");
    return;
  }
  require(spec.max_pairs >= 1 && spec.max_singles >= 1, "need at least one pair and one single");
  require(spec.key_count >= spec.max_pairs + spec.max_singles,
          "key_count must cover max_pairs + max_singles");
  require(spec.min_len >= spec.min_gap + spec.max_pairs + spec.max_singles,
          "sentences too short to place pairs min_gap apart");
  require(spec.vocab_size >= spec.key_count + spec.max_len,
          "vocab_size must leave max_len unique fillers");
}

}  // namespace

std::string_view task_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::kCopy: return "copy";
    case TaskKind::kWindow: return "window";
    case TaskKind::kRelationalMatch: return "relational";
  }
  return "copy";
}

TaskKind parse_task(std::string_view name) {
  if (name == "copy") return TaskKind::kCopy;
  if (name == "window") return TaskKind::kWindow;
  if (name == "relational" || name == "relational-match") return TaskKind::kRelationalMatch;
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected copy, window or relational)");
}

TaskSpec default_task_spec(TaskKind kind) {
  TaskSpec spec;
  spec.kind = kind;
  if (kind == TaskKind::kRelationalMatch) {
    spec.vocab_size = 64;
    spec.min_len = 24;
    spec.max_len = 32;
  }
  return spec;
}

std::vector<std::string> derive_labels(const TaskSpec& spec,
                                       const std::vector<std::string>& tokens) {
  std::vector<std::string> labels(tokens.size(), "O");
  switch (spec.kind) {
    case TaskKind::kCopy:
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::size_t c = token_number(tokens[i]) % (spec.num_types + 1);
        if (c > 0) labels[i] = "B-ENT" + std::to_string(c - 1);
      }
      break;
    case TaskKind::kWindow:
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        if (token_number(tokens[i - 1]) % 3 == 0) {
          labels[i] = "B-ENT" + std::to_string(token_number(tokens[i]) % spec.num_types);
        }
      }
      break;
    case TaskKind::kRelationalMatch: {
      std::unordered_map<std::string, std::size_t> count;
      for (const auto& t : tokens) ++count[t];
      for (std::size_t i = 0; i < tokens.size(); ++i)
        if (count[tokens[i]] > 1) labels[i] = "B-MATCH";
      break;
    }
  }
  return labels;
}

SyntheticData generate(const TaskSpec& spec) {
  check_spec(spec);
  Rng rng(spec.seed);
  std::unordered_set<std::string> seen;
  auto draw_split = [&](std::size_t count, std::uint64_t stream) {
    Rng split_rng = rng.split(stream);
    Corpus out;
    std::size_t attempts = 0;
    while (out.size() < count) {
      if (++attempts > 100 * count + 1000) {
        throw ConfigError("task spec cannot produce enough distinct sentences");
      }
      Sentence s;
      s.tokens = spec.kind == TaskKind::kRelationalMatch ? relational_tokens(spec, split_rng)
                                                         : sequential_tokens(spec, split_rng);
      std::string joined;
      for (const auto& t : s.tokens) joined += t + ' ';
      if (!seen.insert(joined).second) continue;
      s.labels = derive_labels(spec, s.tokens);
      out.push_back(std::move(s));
    }
    return out;
  };
  SyntheticData data;
  data.train = draw_split(spec.train_size, 1);
  data.valid = draw_split(spec.valid_size, 2);
  data.test = draw_split(spec.test_size, 3);
  return data;
}

}  // namespace graphfuse
