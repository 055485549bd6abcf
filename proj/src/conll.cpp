// SPDX-License-Identifier: Apache-2.0

#include "graphfuse/conll.hpp"

#include <fstream>
#include <sstream>

#include "graphfuse/errors.hpp"

namespace graphfuse {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

// Calls fn(line_number, fields) for each line; empty `fields` marks a blank.
template <class Fn>
void for_each_line(std::string_view text, Fn fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    fn(++line_no, split_fields(line));
    pos = end + 1;
  }
}

}  // namespace

bool is_bio_label(std::string_view label) {
  if (label == "O") return true;
  if (label.size() < 3) return false;
  return (label[0] == 'B' || label[0] == 'I') && label[1] == '-';
}

Corpus parse_conll(std::string_view text) {
  Corpus corpus;
  Sentence current;
  for_each_line(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (fields.empty()) {
      if (!current.tokens.empty()) corpus.push_back(std::move(current));
      current = Sentence{};
      return;
    }
    if (fields.size() != 2) {
      throw ParseError(line_no, "expected 2 fields (token label), found " +
                                    std::to_string(fields.size()));
    }
    if (fields[1] != kIgnoreLabel && !is_bio_label(fields[1])) {
      throw ParseError(line_no, "label '" + std::string(fields[1]) +
                                    "' is not O, B-TYPE, I-TYPE or -100");
    }
    current.tokens.emplace_back(fields[0]);
    current.labels.emplace_back(fields[1]);
  });
  if (!current.tokens.empty()) corpus.push_back(std::move(current));
  return corpus;
}

std::vector<std::vector<std::string>> parse_tokens(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  for_each_line(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (fields.empty()) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
      return;
    }
    if (fields.size() > 2) {
      throw ParseError(line_no, "expected 1 or 2 fields, found " + std::to_string(fields.size()));
    }
    current.emplace_back(fields[0]);
  });
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string serialize_conll(const Corpus& corpus) {
  std::string out;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    if (s > 0) out += '\n';
    const Sentence& sent = corpus[s];
    for (std::size_t i = 0; i < sent.tokens.size(); ++i) {
      out += sent.tokens[i];
      out += ' ';
      out += sent.labels[i];
      out += '\n';
    }
  }
  return out;
}

std::string normalize_conll(std::string_view text) {
  std::string out;
  bool pending_blank = false;
  for_each_line(text, [&](std::size_t, const std::vector<std::string_view>& fields) {
    if (fields.empty()) {
      pending_blank = !out.empty();
      return;
    }
    if (pending_blank) out += '\n';
    pending_blank = false;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i > 0) out += ' ';
      out += fields[i];
    }
    out += '\n';
  });
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Corpus read_conll_file(const std::filesystem::path& path) {
  try {
    return parse_conll(read_text_file(path));
  } catch (const ParseError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace graphfuse
