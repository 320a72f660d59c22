// Copyright 2026 The cvclean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// Common Voice style manifests: parsing, token counting and eligibility.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cvclean/error.hpp"
#include "cvclean/text.hpp"
#include "cvclean/unicode.hpp"

namespace cvclean {

/// Utterances shorter than this many tokens are not scored.
inline constexpr std::size_t kMinTokens = 3;

enum class TokenizerMode { kWhitespace, kPerCharacter };

struct TokenizerPolicy {
  TokenizerMode mode = TokenizerMode::kWhitespace;
  std::string language;
};

/// Languages written without word-separating whitespace. Covers the Common
/// Voice codes for Cantonese, Mandarin, Thai and Japanese.
inline const std::set<std::string>& default_whitespaceless_languages() {
  static const std::set<std::string> langs = {"yue", "zh-HK", "zh-CN",
                                              "zh-TW", "th",    "ja"};
  return langs;
}

inline TokenizerPolicy default_policy(
    const std::string& language,
    const std::set<std::string>& whitespaceless =
        default_whitespaceless_languages()) {
  return {whitespaceless.count(language) ? TokenizerMode::kPerCharacter
                                         : TokenizerMode::kWhitespace,
          language};
}

/// Whitespace mode counts maximal non-whitespace runs. Per-character mode
/// counts code points that are neither whitespace nor punctuation/symbols.
inline std::size_t count_tokens(std::string_view sentence,
                                const TokenizerPolicy& policy) {
  std::size_t count = 0;
  std::size_t pos = 0;
  bool in_run = false;
  while (pos < sentence.size()) {
    const char32_t c = unicode::decode_next(sentence, pos);
    const bool space = unicode::is_whitespace(c);
    if (policy.mode == TokenizerMode::kWhitespace) {
      if (!space && !in_run) ++count;
      in_run = !space;
    } else if (!space && !unicode::is_punctuation_or_symbol(c)) {
      ++count;
    }
  }
  return count;
}

struct UtteranceRecord {
  std::string client_id;
  std::string utterance_id;
  std::string sentence;
  std::string language;
  std::size_t token_count = 0;
  std::size_t row_index = 0;
  /// Every field of the source row, in header order.
  std::vector<std::string> fields;
};

struct LanguageManifest {
  std::string language;
  TokenizerPolicy policy;
  std::string source_version;
  std::vector<std::string> columns;
  std::vector<UtteranceRecord> records;

  std::optional<std::size_t> column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  }
};

namespace detail {

inline std::size_t require_column(const std::vector<std::string>& columns,
                                  std::string_view name) {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw FormatError("manifest is missing required column '" +
                      std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

}  // namespace detail

/// Parses a tab-separated manifest with a header row. Required columns are
/// client_id, path and sentence; a token_count column overrides the
/// built-in tokenizer. Blank lines are ignored.
inline LanguageManifest parse_manifest(std::string_view tsv,
                                       const std::string& language,
                                       const TokenizerPolicy& policy,
                                       std::string source_version = {}) {
  if (tsv.size() >= 3 && tsv.substr(0, 3) == "\xEF\xBB\xBF") {
    tsv.remove_prefix(3);
  }
  const auto lines = text::split_lines(tsv);
  if (lines.empty()) throw FormatError("manifest has no header row");

  LanguageManifest m;
  m.language = language;
  m.policy = policy;
  m.source_version = std::move(source_version);
  for (auto col : text::split(lines.front().content, '\t')) {
    m.columns.emplace_back(col);
  }
  const std::size_t client_col = detail::require_column(m.columns, "client_id");
  const std::size_t path_col = detail::require_column(m.columns, "path");
  const std::size_t sentence_col = detail::require_column(m.columns, "sentence");
  const auto count_col = m.column("token_count");

  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.content.empty()) continue;
    auto fields = text::split(line.content, '\t');
    if (fields.size() != m.columns.size()) {
      throw RowError(line.number, "expected " +
                                      std::to_string(m.columns.size()) +
                                      " fields, found " +
                                      std::to_string(fields.size()));
    }
    UtteranceRecord r;
    r.client_id = std::string(fields[client_col]);
    r.utterance_id = std::string(fields[path_col]);
    r.sentence = std::string(fields[sentence_col]);
    r.language = language;
    r.row_index = m.records.size();
    if (r.client_id.empty()) throw RowError(line.number, "empty client_id");
    if (r.utterance_id.empty()) throw RowError(line.number, "empty path");
    if (count_col && !fields[*count_col].empty()) {
      const auto n = text::parse_number<std::size_t>(fields[*count_col]);
      if (!n) {
        throw RowError(line.number, "token_count is not a non-negative integer");
      }
      r.token_count = *n;
    } else {
      r.token_count = count_tokens(r.sentence, policy);
    }
    if (!seen.insert(r.utterance_id).second) {
      throw DuplicationError("duplicate utterance '" + r.utterance_id +
                             "' at line " + std::to_string(line.number));
    }
    r.fields.reserve(fields.size());
    for (auto f : fields) r.fields.emplace_back(f);
    m.records.push_back(std::move(r));
  }
  return m;
}

inline LanguageManifest load_manifest(const std::string& path,
                                      const std::string& language,
                                      const TokenizerPolicy& policy) {
  return parse_manifest(text::read_file(path), language, policy, path);
}

enum class Eligibility { kEligible, kTooShort, kSingletonClient };

inline std::string_view to_string(Eligibility e) {
  switch (e) {
    case Eligibility::kEligible:
      return "eligible";
    case Eligibility::kTooShort:
      return "too_short";
    case Eligibility::kSingletonClient:
      return "singleton_client";
  }
  return "?";
}

/// One tag per record, parallel to manifest.records. Singleton takes
/// precedence over too_short.
inline std::vector<Eligibility> mark_eligibility(const LanguageManifest& m) {
  std::unordered_map<std::string_view, std::size_t> per_client;
  for (const auto& r : m.records) ++per_client[r.client_id];
  std::vector<Eligibility> tags;
  tags.reserve(m.records.size());
  for (const auto& r : m.records) {
    if (per_client[r.client_id] == 1) {
      tags.push_back(Eligibility::kSingletonClient);
    } else if (r.token_count < kMinTokens) {
      tags.push_back(Eligibility::kTooShort);
    } else {
      tags.push_back(Eligibility::kEligible);
    }
  }
  return tags;
}

/// Serializes a manifest back to TSV with its original column order.
inline std::string format_manifest(const LanguageManifest& m) {
  std::string out = text::join(m.columns, '\t');
  out.push_back('\n');
  for (const auto& r : m.records) {
    out += text::join(r.fields, '\t');
    out.push_back('\n');
  }
  return out;
}

}  // namespace cvclean
