// SPDX-License-Identifier: Apache-2.0
//
// Two-column CoNLL reader/writer: "token<ws>label" per line, blank line
// between sentences, tab or space separated, UTF-8.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace graphfuse {

/// File-level label for positions excluded from loss and scoring.
inline constexpr std::string_view kIgnoreLabel = "-100";

struct Sentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;

  std::size_t size() const { return tokens.size(); }
  bool operator==(const Sentence&) const = default;
};

using Corpus = std::vector<Sentence>;

/// O, B-TYPE or I-TYPE with a non-empty TYPE.
bool is_bio_label(std::string_view label);

/// Throws ParseError (with 1-based line number) on lines that do not have
/// exactly two fields or whose label is neither BIO nor "-100".
Corpus parse_conll(std::string_view text);

/// Token-only input for prediction: one or two fields per line; the second
/// field, if present, is ignored.
std::vector<std::vector<std::string>> parse_tokens(std::string_view text);

std::string serialize_conll(const Corpus& corpus);

/// Canonical form of a CoNLL text: fields joined by one space, CR stripped,
/// runs of blank lines collapsed, no leading/trailing blank lines.
std::string normalize_conll(std::string_view text);

/// Reads a whole file; DataError if it cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

Corpus read_conll_file(const std::filesystem::path& path);

}  // namespace graphfuse
