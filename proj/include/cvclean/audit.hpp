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

// Stratified audit sampling, annotator assignment, label bookkeeping and
// inter-annotator agreement.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cvclean/error.hpp"
#include "cvclean/log.hpp"
#include "cvclean/random.hpp"
#include "cvclean/scoring.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

// ---------------------------------------------------------------------------
// Labels

enum class Label {
  kSameSpeaker,
  kDifferentSpeaker,
  kAudioQualityIssue,
  kMissingSpeech,
  kNotSure,
};

inline constexpr std::size_t kNumLabels = 5;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::kSameSpeaker, Label::kDifferentSpeaker, Label::kAudioQualityIssue,
    Label::kMissingSpeech, Label::kNotSure};

inline std::string_view to_string(Label l) {
  switch (l) {
    case Label::kSameSpeaker:
      return "same_speaker";
    case Label::kDifferentSpeaker:
      return "different_speaker";
    case Label::kAudioQualityIssue:
      return "audio_quality_issue";
    case Label::kMissingSpeech:
      return "missing_speech";
    case Label::kNotSure:
      return "not_sure";
  }
  return "?";
}

inline std::optional<Label> parse_label(std::string_view s) {
  for (Label l : kAllLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

struct AuditLabel {
  std::string trial_id;
  std::string annotator;
  Label label = Label::kNotSure;
  std::string timestamp;  // ISO-8601, informational only

  bool operator==(const AuditLabel&) const = default;
};

// ---------------------------------------------------------------------------
// Score bins

inline constexpr std::size_t kNumScoreBins = 6;

/// Bins (-inf,0.1), [0.1,0.2), [0.2,0.3), [0.3,0.4), [0.4,0.5), [0.5,+inf).
inline std::size_t score_bin(double s) {
  constexpr std::array<double, kNumScoreBins - 1> kEdges = {0.1, 0.2, 0.3, 0.4,
                                                            0.5};
  std::size_t b = 0;
  while (b < kEdges.size() && s >= kEdges[b]) ++b;
  return b;
}

inline std::string bin_name(std::size_t b) {
  static constexpr std::array<std::string_view, kNumScoreBins> kNames = {
      "<0.1", "[0.1,0.2)", "[0.2,0.3)", "[0.3,0.4)", "[0.4,0.5)", ">=0.5"};
  return b < kNames.size() ? std::string(kNames[b]) : "?";
}

// ---------------------------------------------------------------------------
// Trials

enum class AuditRound { kOne = 1, kTwo = 2 };

/// Annotator-facing trial. Carries no score, bin or client id; those live
/// in the separate ScoredTrial table.
struct AuditTrial {
  std::string trial_id;
  AuditRound round = AuditRound::kOne;
  std::string language;
  std::string enrollment_id;
  std::string test_id;
  std::vector<std::string> assignees;
  std::optional<std::string> origin_annotator;  // round two only
  std::optional<std::string> source_trial_id;   // round two only

  bool operator==(const AuditTrial&) const = default;
};

/// Join table from trial id back to the scored pair. Never served to
/// annotators.
struct ScoredTrial {
  std::string trial_id;
  std::string language;
  std::string client_id;
  std::string enrollment_id;
  std::string test_id;
  double score = 0.0;
  std::size_t bin = 0;

  bool operator==(const ScoredTrial&) const = default;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace detail

/// Opaque round-one trial id: a hash of the pair identity, so labels can be
/// joined back to a scored-pair file without the trial table.
inline std::string trial_id_for_pair(const ScoredPair& p) {
  return "t" + detail::hex64(fnv1a64(p.language + '\t' + p.enrollment_id +
                                     '\t' + p.test_id));
}

inline std::string round_two_trial_id(std::string_view source_trial_id) {
  return "r" + detail::hex64(fnv1a64("round2\t" + std::string(source_trial_id)));
}

struct BinShortfall {
  std::string language;
  std::size_t bin = 0;
  std::size_t available = 0;
  std::size_t requested = 0;
};

struct Round1Sample {
  std::vector<AuditTrial> trials;
  std::vector<ScoredTrial> scored;
  std::vector<BinShortfall> shortfalls;
  std::vector<std::string> skipped_languages;
};

/// Per language, draws min(per_bin, bin size) scored pairs uniformly
/// without replacement from each score bin. Every (language, bin) cell has
/// its own seeded stream, so adding a language leaves the others unchanged.
inline Round1Sample sample_round1(std::span<const ScoredPair> pairs,
                                  std::size_t per_bin, std::uint64_t seed) {
  std::map<std::string, std::array<std::vector<const ScoredPair*>, kNumScoreBins>>
      cells;
  std::set<std::string> languages;
  for (const auto& p : pairs) {
    languages.insert(p.language);
    if (p.status != PairStatus::kScored || !p.score) continue;
    cells[p.language][score_bin(*p.score)].push_back(&p);
  }

  Round1Sample out;
  for (const auto& lang : languages) {
    const auto it = cells.find(lang);
    if (it == cells.end()) {
      log::warn("sample_round1: no scored pairs for language '" + lang +
                "', skipped");
      out.skipped_languages.push_back(lang);
      continue;
    }
    for (std::size_t b = 0; b < kNumScoreBins; ++b) {
      const auto& candidates = it->second[b];
      if (candidates.size() < per_bin) {
        log::warn("sample_round1: language '" + lang + "' bin " + bin_name(b) +
                  " has " + std::to_string(candidates.size()) + " of " +
                  std::to_string(per_bin) + " pairs");
        out.shortfalls.push_back({lang, b, candidates.size(), per_bin});
      }
      Rng rng(derive_seed(seed, lang + "#bin" + std::to_string(b)));
      for (std::size_t idx :
           rng.sample_without_replacement(candidates.size(), per_bin)) {
        const ScoredPair& p = *candidates[idx];
        const std::string id = trial_id_for_pair(p);
        out.trials.push_back({id, AuditRound::kOne, p.language, p.enrollment_id,
                              p.test_id, {}, std::nullopt, std::nullopt});
        out.scored.push_back({id, p.language, p.client_id, p.enrollment_id,
                              p.test_id, *p.score, b});
      }
    }
  }
  return out;
}

/// Deals languages (sorted by code) round-robin to annotators; every trial
/// of a language goes to the same annotator. Returns language -> annotator.
inline std::map<std::string, std::string> assign_annotators(
    std::vector<AuditTrial>& trials, std::span<const std::string> annotators) {
  if (annotators.empty()) throw ContractError("annotator list is empty");
  std::set<std::string> languages;
  for (const auto& t : trials) {
    if (t.round == AuditRound::kOne) languages.insert(t.language);
  }
  std::map<std::string, std::string> owner;
  std::size_t i = 0;
  for (const auto& lang : languages) owner[lang] = annotators[i++ % annotators.size()];
  for (auto& t : trials) {
    if (t.round == AuditRound::kOne) t.assignees = {owner.at(t.language)};
  }
  return owner;
}

/// Per annotator, re-samples min(n, labeled count) of the round-one trials
/// they labeled. Each becomes a round-two trial for every other annotator.
inline std::vector<AuditTrial> sample_round2(
    std::span<const AuditTrial> round1, std::span<const AuditLabel> labels,
    std::span<const std::string> annotators, std::size_t n_per_annotator,
    std::uint64_t seed) {
  if (annotators.empty()) throw ContractError("annotator list is empty");
  std::map<std::string_view, const AuditTrial*> by_id;
  for (const auto& t : round1) {
    if (t.round == AuditRound::kOne) by_id[t.trial_id] = &t;
  }
  std::vector<AuditTrial> out;
  for (const auto& annotator : annotators) {
    std::set<std::string_view> labeled;
    for (const auto& l : labels) {
      if (l.annotator != annotator) continue;
      const auto it = by_id.find(l.trial_id);
      if (it == by_id.end()) continue;
      const auto& as = it->second->assignees;
      if (std::find(as.begin(), as.end(), annotator) != as.end()) {
        labeled.insert(it->second->trial_id);
      }
    }
    if (labeled.empty()) {
      log::warn("sample_round2: annotator '" + annotator +
                "' has no round-one labels, skipped");
      continue;
    }
    const std::vector<std::string_view> pool(labeled.begin(), labeled.end());
    Rng rng(derive_seed(seed, "round2#" + annotator));
    for (std::size_t idx :
         rng.sample_without_replacement(pool.size(), n_per_annotator)) {
      const AuditTrial& src = *by_id.at(pool[idx]);
      AuditTrial t;
      t.trial_id = round_two_trial_id(src.trial_id);
      t.round = AuditRound::kTwo;
      t.language = src.language;
      t.enrollment_id = src.enrollment_id;
      t.test_id = src.test_id;
      for (const auto& a : annotators) {
        if (a != annotator) t.assignees.push_back(a);
      }
      t.origin_annotator = annotator;
      t.source_trial_id = src.trial_id;
      out.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Agreement

struct AgreementResult {
  double kappa = 0.0;
  std::size_t n_subjects = 0;
  std::size_t n_raters = 0;
  std::size_t n_categories = 0;
  std::size_t dropped = 0;  // subjects with fewer than n_raters ratings
};

/// Fleiss' kappa. ratings[i] holds the category index (< n_categories) of
/// every rating of subject i. The rater count r is the largest number of
/// ratings any subject has; subjects with fewer are dropped.
inline AgreementResult fleiss_kappa(
    std::span<const std::vector<std::size_t>> ratings,
    std::size_t n_categories) {
  if (n_categories == 0) throw ContractError("fleiss_kappa: no categories");
  std::size_t r = 0;
  for (const auto& s : ratings) r = std::max(r, s.size());
  AgreementResult res;
  res.n_raters = r;
  res.n_categories = n_categories;

  std::vector<double> totals(n_categories, 0.0);
  double sum_p = 0.0;
  for (const auto& s : ratings) {
    if (s.size() < r) {
      ++res.dropped;
      continue;
    }
    std::vector<double> counts(n_categories, 0.0);
    for (std::size_t c : s) {
      if (c >= n_categories) throw ContractError("fleiss_kappa: bad category");
      counts[c] += 1.0;
    }
    double sq = 0.0;
    for (std::size_t j = 0; j < n_categories; ++j) {
      sq += counts[j] * counts[j];
      totals[j] += counts[j];
    }
    const double rd = static_cast<double>(r);
    sum_p += (sq - rd) / (rd * (rd - 1.0));
    ++res.n_subjects;
  }
  if (res.dropped) {
    log::warn("fleiss_kappa: dropped " + std::to_string(res.dropped) +
              " subject(s) with fewer than " + std::to_string(r) + " ratings");
  }
  if (r < 2 || res.n_subjects < 2) {
    throw InsufficientDataError(
        "fleiss_kappa needs at least 2 subjects with at least 2 ratings each");
  }
  const double n_total = static_cast<double>(res.n_subjects * r);
  double p_e = 0.0;
  for (double t : totals) p_e += (t / n_total) * (t / n_total);
  const double p_bar = sum_p / static_cast<double>(res.n_subjects);
  res.kappa = p_e >= 1.0 ? 1.0 : (p_bar - p_e) / (1.0 - p_e);
  return res;
}

/// Ratings for each round-two trial: the origin annotator's round-one label
/// on the source trial plus every re-audit label. Labels outside
/// `categories` are not counted, so such trials end up short and are
/// dropped by fleiss_kappa.
inline std::vector<std::vector<std::size_t>> round_two_ratings(
    std::span<const AuditTrial> trials, std::span<const AuditLabel> labels,
    std::span<const Label> categories) {
  std::map<std::pair<std::string_view, std::string_view>, Label> lookup;
  for (const auto& l : labels) lookup[{l.trial_id, l.annotator}] = l.label;
  const auto category_of = [&](Label l) -> std::optional<std::size_t> {
    const auto it = std::find(categories.begin(), categories.end(), l);
    if (it == categories.end()) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  };
  std::vector<std::vector<std::size_t>> out;
  for (const auto& t : trials) {
    if (t.round != AuditRound::kTwo || !t.origin_annotator || !t.source_trial_id) {
      continue;
    }
    std::vector<std::size_t> row;
    const auto add = [&](std::string_view trial, std::string_view annotator) {
      const auto it = lookup.find({trial, annotator});
      if (it == lookup.end()) return;
      if (auto c = category_of(it->second)) row.push_back(*c);
    };
    add(*t.source_trial_id, *t.origin_annotator);
    for (const auto& a : t.assignees) add(t.trial_id, a);
    out.push_back(std::move(row));
  }
  return out;
}

struct LabelDistribution {
  std::size_t total = 0;
  std::array<std::size_t, kNumLabels> counts{};
  std::array<double, kNumLabels> shares{};
};

namespace detail {

inline void finish(LabelDistribution& d) {
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    d.shares[i] = d.total ? static_cast<double>(d.counts[i]) /
                                static_cast<double>(d.total)
                          : 0.0;
  }
}

}  // namespace detail

/// Shares of the five labels, in kAllLabels order.
inline LabelDistribution label_distribution(std::span<const AuditLabel> labels) {
  if (labels.empty()) throw EmptyInputError("label_distribution: no labels");
  LabelDistribution d;
  for (const auto& l : labels) {
    ++d.counts[static_cast<std::size_t>(l.label)];
    ++d.total;
  }
  detail::finish(d);
  return d;
}

/// Label distribution within each score bin.
inline std::array<LabelDistribution, kNumScoreBins> label_distribution_by_bin(
    std::span<const AuditLabel> labels, std::span<const ScoredTrial> scored) {
  if (labels.empty()) throw EmptyInputError("label_distribution: no labels");
  std::map<std::string_view, std::size_t> bin_of;
  for (const auto& s : scored) bin_of[s.trial_id] = s.bin;
  std::array<LabelDistribution, kNumScoreBins> out{};
  for (const auto& l : labels) {
    const auto it = bin_of.find(l.trial_id);
    if (it == bin_of.end()) {
      throw ConsistencyError("label for unknown trial '" + l.trial_id + "'");
    }
    auto& d = out[it->second];
    ++d.counts[static_cast<std::size_t>(l.label)];
    ++d.total;
  }
  for (auto& d : out) detail::finish(d);
  return out;
}

// ---------------------------------------------------------------------------
// JSON-lines persistence

inline nlohmann::json to_json(const AuditTrial& t) {
  nlohmann::json j = {{"trial_id", t.trial_id},
                      {"round", static_cast<int>(t.round)},
                      {"language", t.language},
                      {"enrollment_id", t.enrollment_id},
                      {"test_id", t.test_id},
                      {"assignees", t.assignees}};
  if (t.origin_annotator) j["origin_annotator"] = *t.origin_annotator;
  if (t.source_trial_id) j["source_trial_id"] = *t.source_trial_id;
  return j;
}

inline AuditTrial trial_from_json(const nlohmann::json& j) {
  AuditTrial t;
  t.trial_id = j.at("trial_id").get<std::string>();
  const int round = j.at("round").get<int>();
  if (round != 1 && round != 2) throw FormatError("trial round must be 1 or 2");
  t.round = static_cast<AuditRound>(round);
  t.language = j.at("language").get<std::string>();
  t.enrollment_id = j.at("enrollment_id").get<std::string>();
  t.test_id = j.at("test_id").get<std::string>();
  t.assignees = j.value("assignees", std::vector<std::string>{});
  if (j.contains("origin_annotator")) {
    t.origin_annotator = j["origin_annotator"].get<std::string>();
  }
  if (j.contains("source_trial_id")) {
    t.source_trial_id = j["source_trial_id"].get<std::string>();
  }
  return t;
}

inline nlohmann::json to_json(const ScoredTrial& s) {
  return {{"trial_id", s.trial_id},   {"language", s.language},
          {"client_id", s.client_id}, {"enrollment_id", s.enrollment_id},
          {"test_id", s.test_id},     {"score", s.score},
          {"bin", s.bin}};
}

inline ScoredTrial scored_trial_from_json(const nlohmann::json& j) {
  ScoredTrial s;
  s.trial_id = j.at("trial_id").get<std::string>();
  s.language = j.at("language").get<std::string>();
  s.client_id = j.at("client_id").get<std::string>();
  s.enrollment_id = j.at("enrollment_id").get<std::string>();
  s.test_id = j.at("test_id").get<std::string>();
  s.score = j.at("score").get<double>();
  s.bin = score_bin(s.score);
  return s;
}

inline nlohmann::json to_json(const AuditLabel& l) {
  return {{"trial_id", l.trial_id},
          {"annotator", l.annotator},
          {"label", to_string(l.label)},
          {"timestamp", l.timestamp}};
}

inline AuditLabel label_from_json(const nlohmann::json& j) {
  AuditLabel l;
  l.trial_id = j.at("trial_id").get<std::string>();
  l.annotator = j.at("annotator").get<std::string>();
  const auto label = parse_label(j.at("label").get<std::string>());
  if (!label) throw FormatError("unknown label '" + j["label"].dump() + "'");
  l.label = *label;
  l.timestamp = j.value("timestamp", "");
  return l;
}

/// Parses one JSON object per non-blank line.
template <typename Fn>
auto parse_jsonl(std::string_view data, Fn&& from_json) {
  std::vector<decltype(from_json(nlohmann::json{}))> out;
  for (const auto& line : text::split_lines(data)) {
    if (line.content.find_first_not_of(" \t") == std::string_view::npos) continue;
    try {
      out.push_back(from_json(nlohmann::json::parse(line.content)));
    } catch (const nlohmann::json::exception& e) {
      throw RowError(line.number, e.what());
    } catch (const FormatError& e) {
      throw RowError(line.number, e.what());
    }
  }
  return out;
}

template <typename T>
std::string format_jsonl(std::span<const T> items) {
  std::string out;
  for (const auto& item : items) {
    out += to_json(item).dump();
    out.push_back('\n');
  }
  return out;
}

inline std::vector<AuditTrial> load_trials(const std::string& path) {
  return parse_jsonl(text::read_file(path), trial_from_json);
}

inline std::vector<ScoredTrial> load_scored_trials(const std::string& path) {
  return parse_jsonl(text::read_file(path), scored_trial_from_json);
}

inline std::vector<AuditLabel> load_labels(const std::string& path) {
  return parse_jsonl(text::read_file(path), label_from_json);
}

/// Scored-trial table keyed by the round-one id of every pair.
inline std::vector<ScoredTrial> scored_trials_from_pairs(
    std::span<const ScoredPair> pairs) {
  std::vector<ScoredTrial> out;
  for (const auto& p : pairs) {
    if (p.status != PairStatus::kScored || !p.score) continue;
    out.push_back({trial_id_for_pair(p), p.language, p.client_id,
                   p.enrollment_id, p.test_id, *p.score, score_bin(*p.score)});
  }
  return out;
}

}  // namespace cvclean
