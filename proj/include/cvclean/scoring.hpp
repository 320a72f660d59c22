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

// Enrollment selection, test/enrollment pair generation, cosine scoring
// and per-language score summaries.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "cvclean/corpus.hpp"
#include "cvclean/embedding.hpp"
#include "cvclean/error.hpp"
#include "cvclean/stats.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

struct Enrollment {
  std::string utterance_id;
  std::size_t row_index = 0;
};

/// client_id -> enrollment recording, for clients with at least two
/// records.
struct EnrollmentAssignment {
  std::string language;
  std::map<std::string, Enrollment> clients;
};

/// The enrollment is the manifest-final record of each client. Its token
/// count is not considered.
inline EnrollmentAssignment select_enrollment(
    const LanguageManifest& m, std::span<const Eligibility> eligibility) {
  if (eligibility.size() != m.records.size()) {
    throw ContractError("eligibility does not match manifest size");
  }
  EnrollmentAssignment a;
  a.language = m.language;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    if (eligibility[i] == Eligibility::kSingletonClient) continue;
    const auto& r = m.records[i];
    auto& slot = a.clients[r.client_id];
    if (slot.utterance_id.empty() || r.row_index > slot.row_index) {
      slot = {r.utterance_id, r.row_index};
    }
  }
  return a;
}

enum class PairStatus {
  kUnscored,
  kScored,
  kMissingEnrollmentEmbedding,
  kMissingTestEmbedding,
  kSkippedTooShort,
};

inline std::string_view to_string(PairStatus s) {
  switch (s) {
    case PairStatus::kUnscored:
      return "unscored";
    case PairStatus::kScored:
      return "scored";
    case PairStatus::kMissingEnrollmentEmbedding:
      return "missing_enrollment_embedding";
    case PairStatus::kMissingTestEmbedding:
      return "missing_test_embedding";
    case PairStatus::kSkippedTooShort:
      return "skipped_too_short";
  }
  return "?";
}

inline std::optional<PairStatus> parse_pair_status(std::string_view s) {
  for (auto st : {PairStatus::kUnscored, PairStatus::kScored,
                  PairStatus::kMissingEnrollmentEmbedding,
                  PairStatus::kMissingTestEmbedding,
                  PairStatus::kSkippedTooShort}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

struct ScoredPair {
  std::string language;
  std::string client_id;
  std::string enrollment_id;
  std::string test_id;
  std::optional<double> score;
  PairStatus status = PairStatus::kUnscored;

  bool operator==(const ScoredPair&) const = default;
};

/// One pair per non-enrollment record of every assigned client, ordered by
/// client_id and then test row. Too-short test records are carried with
/// status skipped_too_short.
inline std::vector<ScoredPair> generate_pairs(
    const LanguageManifest& m, const EnrollmentAssignment& assignment,
    std::span<const Eligibility> eligibility) {
  if (eligibility.size() != m.records.size()) {
    throw ContractError("eligibility does not match manifest size");
  }
  std::map<std::string_view, std::vector<std::size_t>> rows_by_client;
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    rows_by_client[m.records[i].client_id].push_back(i);
  }
  std::vector<ScoredPair> pairs;
  for (const auto& [client, enrollment] : assignment.clients) {
    const auto it = rows_by_client.find(client);
    if (it == rows_by_client.end()) continue;
    for (std::size_t i : it->second) {
      const auto& r = m.records[i];
      if (r.utterance_id == enrollment.utterance_id) continue;
      ScoredPair p;
      p.language = m.language;
      p.client_id = client;
      p.enrollment_id = enrollment.utterance_id;
      p.test_id = r.utterance_id;
      p.status = eligibility[i] == Eligibility::kTooShort
                     ? PairStatus::kSkippedTooShort
                     : PairStatus::kUnscored;
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

namespace detail {

template <EmbeddingProvider P>
void score_one(ScoredPair& p, const P& provider) {
  if (p.status == PairStatus::kSkippedTooShort) {
    p.score.reset();
    return;
  }
  const EmbeddingVector* e = provider.get(p.enrollment_id);
  const EmbeddingVector* t = provider.get(p.test_id);
  if (!e) {
    p.status = PairStatus::kMissingEnrollmentEmbedding;
    p.score.reset();
  } else if (!t) {
    p.status = PairStatus::kMissingTestEmbedding;
    p.score.reset();
  } else {
    p.score = cosine_similarity(*e, *t);
    p.status = PairStatus::kScored;
  }
}

}  // namespace detail

/// Scores every pair in place. Work is split into contiguous chunks, so the
/// output is independent of the thread count.
template <EmbeddingProvider P>
std::vector<ScoredPair> score_pairs(std::vector<ScoredPair> pairs,
                                    const P& provider,
                                    unsigned threads = 1) {
  threads = std::max(1u, threads);
  if (threads == 1 || pairs.size() < 2 * threads) {
    for (auto& p : pairs) detail::score_one(p, provider);
    return pairs;
  }
  const std::size_t chunk = (pairs.size() + threads - 1) / threads;
  std::vector<std::jthread> workers;
  for (std::size_t begin = 0; begin < pairs.size(); begin += chunk) {
    const std::size_t end = std::min(pairs.size(), begin + chunk);
    workers.emplace_back([&pairs, &provider, begin, end] {
      for (std::size_t i = begin; i < end; ++i) {
        detail::score_one(pairs[i], provider);
      }
    });
  }
  workers.clear();
  return pairs;
}

inline constexpr std::size_t kHistogramBins = 40;
inline constexpr double kHistogramWidth = 0.05;

/// Bin k covers [-1 + 0.05k, -1 + 0.05(k+1)); the last bin is closed above.
inline std::size_t histogram_bin(double s) {
  const auto lower = [](std::ptrdiff_t k) {
    return -1.0 + kHistogramWidth * static_cast<double>(k);
  };
  auto k = static_cast<std::ptrdiff_t>(std::floor((s + 1.0) / kHistogramWidth));
  k = std::clamp<std::ptrdiff_t>(k, 0, kHistogramBins - 1);
  if (k > 0 && s < lower(k)) --k;
  if (k + 1 < static_cast<std::ptrdiff_t>(kHistogramBins) && s >= lower(k + 1)) {
    ++k;
  }
  return static_cast<std::size_t>(k);
}

struct ScoreSummary {
  std::string language;  // "all" for the pooled summary
  std::size_t n = 0;
  double q1 = 0, median = 0, q3 = 0, iqr = 0;
  std::array<std::size_t, kHistogramBins> histogram{};
};

inline constexpr std::string_view kAllLanguages = "all";

/// Summary over scored pairs of one language, or of every language when
/// group == "all".
inline ScoreSummary summarize_scores(std::span<const ScoredPair> pairs,
                                     std::string_view group = kAllLanguages) {
  std::vector<double> scores;
  for (const auto& p : pairs) {
    if (p.status != PairStatus::kScored || !p.score) continue;
    if (group != kAllLanguages && p.language != group) continue;
    scores.push_back(*p.score);
  }
  if (scores.empty()) {
    throw EmptyInputError("no scored pairs for group '" + std::string(group) +
                          "'");
  }
  std::sort(scores.begin(), scores.end());
  ScoreSummary s;
  s.language = std::string(group);
  s.n = scores.size();
  s.q1 = stats::quantile_sorted(scores, 0.25);
  s.median = stats::quantile_sorted(scores, 0.5);
  s.q3 = stats::quantile_sorted(scores, 0.75);
  s.iqr = s.q3 - s.q1;
  for (double v : scores) ++s.histogram[histogram_bin(v)];
  return s;
}

/// Summaries for each language (sorted) followed by the pooled one.
inline std::vector<ScoreSummary> summarize_by_language(
    std::span<const ScoredPair> pairs) {
  std::map<std::string, bool> langs;
  for (const auto& p : pairs) {
    if (p.status == PairStatus::kScored) langs[p.language] = true;
  }
  std::vector<ScoreSummary> out;
  for (const auto& [lang, _] : langs) out.push_back(summarize_scores(pairs, lang));
  if (!out.empty()) out.push_back(summarize_scores(pairs, kAllLanguages));
  return out;
}

inline constexpr std::string_view kPairsHeader =
    "language\tclient_id\tenrollment_id\ttest_id\tscore\tstatus";

inline std::string format_pairs(std::span<const ScoredPair> pairs) {
  std::string out(kPairsHeader);
  out.push_back('\n');
  for (const auto& p : pairs) {
    out += p.language + '\t' + p.client_id + '\t' + p.enrollment_id + '\t' +
           p.test_id + '\t';
    if (p.score) out += text::format_fixed(*p.score, 6);
    out.push_back('\t');
    out += to_string(p.status);
    out.push_back('\n');
  }
  return out;
}

inline std::vector<ScoredPair> parse_pairs(std::string_view data) {
  const auto lines = text::split_lines(data);
  if (lines.empty() || lines.front().content != kPairsHeader) {
    throw FormatError("scored-pair file must start with header '" +
                      std::string(kPairsHeader) + "'");
  }
  std::vector<ScoredPair> pairs;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.content.empty()) continue;
    const auto f = text::split(line.content, '\t');
    if (f.size() != 6) throw RowError(line.number, "expected 6 fields");
    ScoredPair p;
    p.language = std::string(f[0]);
    p.client_id = std::string(f[1]);
    p.enrollment_id = std::string(f[2]);
    p.test_id = std::string(f[3]);
    const auto status = parse_pair_status(f[5]);
    if (!status) throw RowError(line.number, "unknown status");
    p.status = *status;
    if (!f[4].empty()) {
      const auto s = text::parse_number<double>(f[4]);
      if (!s || !std::isfinite(*s)) throw RowError(line.number, "bad score");
      p.score = *s;
    }
    if (p.score.has_value() != (p.status == PairStatus::kScored)) {
      throw RowError(line.number, "score must be present iff status is scored");
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

inline std::vector<ScoredPair> load_pairs(const std::string& path) {
  return parse_pairs(text::read_file(path));
}

}  // namespace cvclean
