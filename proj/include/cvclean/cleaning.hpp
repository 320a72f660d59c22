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

// Threshold decisions, data-loss reporting and cleaned-manifest export.

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cvclean/corpus.hpp"
#include "cvclean/error.hpp"
#include "cvclean/scoring.hpp"
#include "cvclean/stats.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

/// Crossover threshold obtained from the perceptual audit.
inline constexpr double kAuditedThreshold = 0.354;
inline constexpr double kDefaultFlagThreshold = 0.10;

enum class ThresholdProvenance { kAuditedCrossover, kEerDerived, kUserSet };

inline std::string_view to_string(ThresholdProvenance p) {
  switch (p) {
    case ThresholdProvenance::kAuditedCrossover:
      return "audited_crossover";
    case ThresholdProvenance::kEerDerived:
      return "eer_derived";
    case ThresholdProvenance::kUserSet:
      return "user_set";
  }
  return "?";
}

struct ThresholdPolicy {
  double tau = kAuditedThreshold;
  ThresholdProvenance provenance = ThresholdProvenance::kAuditedCrossover;
};

enum class Decision { kKeep, kExclude, kUnscoredKeep, kEnrollmentKeep };

inline std::string_view to_string(Decision d) {
  switch (d) {
    case Decision::kKeep:
      return "keep";
    case Decision::kExclude:
      return "exclude";
    case Decision::kUnscoredKeep:
      return "unscored_keep";
    case Decision::kEnrollmentKeep:
      return "enrollment_keep";
  }
  return "?";
}

struct CleaningDecision {
  std::string language;
  std::string client_id;
  std::string utterance_id;
  Decision decision = Decision::kKeep;
  std::optional<double> score;
};

/// Keep iff score >= tau. Unscored pairs are kept and flagged; every
/// client's enrollment utterance gets an enrollment_keep decision placed
/// before that client's test decisions.
inline std::vector<CleaningDecision> apply_threshold(
    std::span<const ScoredPair> pairs, const ThresholdPolicy& policy) {
  if (!std::isfinite(policy.tau)) throw ContractError("tau must be finite");
  std::vector<CleaningDecision> out;
  out.reserve(pairs.size());
  std::set<std::pair<std::string_view, std::string_view>> enrolled;
  for (const auto& p : pairs) {
    if (enrolled.emplace(p.language, p.client_id).second) {
      out.push_back({p.language, p.client_id, p.enrollment_id,
                     Decision::kEnrollmentKeep, std::nullopt});
    }
    CleaningDecision d{p.language, p.client_id, p.test_id,
                       Decision::kUnscoredKeep, std::nullopt};
    if (p.status == PairStatus::kScored && p.score) {
      d.score = p.score;
      d.decision = *p.score >= policy.tau ? Decision::kKeep : Decision::kExclude;
    }
    out.push_back(std::move(d));
  }
  return out;
}

struct LanguageLoss {
  std::string language;
  std::size_t utterances_total = 0;  // scored pairs
  std::size_t utterances_excluded = 0;
  double loss_proportion = 0.0;
};

struct ClientLoss {
  std::string language;
  std::string client_id;
  std::size_t scored = 0;
  std::size_t excluded = 0;
  double loss_proportion = 0.0;
  bool flagged = false;  // loss_proportion >= flag threshold
};

struct CleaningReport {
  double flag_threshold = kDefaultFlagThreshold;
  std::vector<LanguageLoss> languages;
  std::vector<ClientLoss> clients;

  std::size_t utterances_total = 0;
  std::size_t utterances_excluded = 0;
  double median_language_loss = 0.0;
  double mean_language_loss = 0.0;
  std::size_t languages_below_flag = 0;  // loss < flag threshold

  // Clients with at least one scored pair.
  std::size_t clients_scored = 0;
  std::size_t clients_flagged = 0;
  std::size_t clients_at_most_flag = 0;  // loss <= flag threshold
  double share_at_most_flag_of_scored = 0.0;

  // Every distinct client in the manifests, including singletons and
  // clients with nothing scored (those count as losing nothing).
  std::size_t clients_in_manifests = 0;
  std::size_t clients_without_scored_pairs = 0;
  double share_at_most_flag_of_all = 0.0;
};

namespace detail {

using ClientKey = std::pair<std::string, std::string>;

inline const LanguageManifest* find_manifest(
    std::span<const LanguageManifest> manifests, std::string_view language) {
  for (const auto& m : manifests) {
    if (m.language == language) return &m;
  }
  return nullptr;
}

/// Every decision must name a record of its manifest under the same client,
/// and every record of a non-singleton client must have a decision.
inline void check_coverage(std::span<const CleaningDecision> decisions,
                           std::span<const LanguageManifest> manifests) {
  std::map<std::pair<std::string_view, std::string_view>, std::string_view>
      decided;
  for (const auto& d : decisions) {
    const LanguageManifest* m = find_manifest(manifests, d.language);
    if (!m) {
      throw ConsistencyError("decision for unknown language '" + d.language +
                             "'");
    }
    decided.emplace(std::pair<std::string_view, std::string_view>(
                        d.language, d.utterance_id),
                    d.client_id);
  }
  for (const auto& m : manifests) {
    const auto tags = mark_eligibility(m);
    std::set<std::string_view> ids;
    for (std::size_t i = 0; i < m.records.size(); ++i) {
      const auto& r = m.records[i];
      ids.insert(r.utterance_id);
      const auto it = decided.find({m.language, r.utterance_id});
      if (it == decided.end()) {
        if (tags[i] != Eligibility::kSingletonClient) {
          throw ConsistencyError("no decision for scorable utterance '" +
                                 r.utterance_id + "' (" + m.language + ")");
        }
        continue;
      }
      if (it->second != r.client_id) {
        throw ConsistencyError("decision for '" + r.utterance_id +
                               "' names client '" + std::string(it->second) +
                               "', manifest says '" + r.client_id + "'");
      }
    }
    for (const auto& d : decisions) {
      if (d.language == m.language && !ids.count(d.utterance_id)) {
        throw ConsistencyError("decision for utterance '" + d.utterance_id +
                               "' not in the " + m.language + " manifest");
      }
    }
  }
}

}  // namespace detail

/// Loss proportions over scored pairs per language and per client, plus
/// corpus-level aggregates.
inline CleaningReport data_loss_report(
    std::span<const CleaningDecision> decisions,
    std::span<const LanguageManifest> manifests,
    double flag_threshold = kDefaultFlagThreshold) {
  if (decisions.empty()) throw EmptyInputError("no cleaning decisions");
  detail::check_coverage(decisions, manifests);

  CleaningReport rep;
  rep.flag_threshold = flag_threshold;
  std::map<std::string, LanguageLoss> langs;
  std::map<detail::ClientKey, ClientLoss> clients;
  for (const auto& d : decisions) {
    if (d.decision != Decision::kKeep && d.decision != Decision::kExclude) {
      continue;
    }
    const bool excluded = d.decision == Decision::kExclude;
    auto& l = langs[d.language];
    l.language = d.language;
    ++l.utterances_total;
    l.utterances_excluded += excluded;
    auto& c = clients[{d.language, d.client_id}];
    c.language = d.language;
    c.client_id = d.client_id;
    ++c.scored;
    c.excluded += excluded;
  }

  std::vector<double> lang_losses;
  for (auto& [_, l] : langs) {
    l.loss_proportion = static_cast<double>(l.utterances_excluded) /
                        static_cast<double>(l.utterances_total);
    rep.utterances_total += l.utterances_total;
    rep.utterances_excluded += l.utterances_excluded;
    rep.languages_below_flag += l.loss_proportion < flag_threshold;
    lang_losses.push_back(l.loss_proportion);
    rep.languages.push_back(l);
  }
  if (!lang_losses.empty()) {
    rep.median_language_loss = stats::quantile(lang_losses, 0.5);
    rep.mean_language_loss = stats::mean(lang_losses);
  }

  for (auto& [_, c] : clients) {
    c.loss_proportion =
        static_cast<double>(c.excluded) / static_cast<double>(c.scored);
    c.flagged = c.loss_proportion >= flag_threshold;
    ++rep.clients_scored;
    rep.clients_flagged += c.flagged;
    rep.clients_at_most_flag += c.loss_proportion <= flag_threshold;
    rep.clients.push_back(c);
  }
  if (rep.clients_scored) {
    rep.share_at_most_flag_of_scored =
        static_cast<double>(rep.clients_at_most_flag) /
        static_cast<double>(rep.clients_scored);
  }

  std::set<detail::ClientKey> all_clients;
  for (const auto& m : manifests) {
    for (const auto& r : m.records) all_clients.emplace(m.language, r.client_id);
  }
  rep.clients_in_manifests = all_clients.size();
  rep.clients_without_scored_pairs = rep.clients_in_manifests - rep.clients_scored;
  if (rep.clients_in_manifests) {
    rep.share_at_most_flag_of_all =
        static_cast<double>(rep.clients_at_most_flag +
                            rep.clients_without_scored_pairs) /
        static_cast<double>(rep.clients_in_manifests);
  }
  return rep;
}

inline nlohmann::json to_json(const CleaningReport& r) {
  nlohmann::json j;
  j["flag_threshold"] = r.flag_threshold;
  j["utterances_total"] = r.utterances_total;
  j["utterances_excluded"] = r.utterances_excluded;
  j["median_language_loss"] = r.median_language_loss;
  j["mean_language_loss"] = r.mean_language_loss;
  j["languages_below_flag"] = r.languages_below_flag;
  j["clients_scored"] = r.clients_scored;
  j["clients_flagged"] = r.clients_flagged;
  j["clients_at_most_flag"] = r.clients_at_most_flag;
  j["share_at_most_flag_of_scored"] = r.share_at_most_flag_of_scored;
  j["clients_in_manifests"] = r.clients_in_manifests;
  j["clients_without_scored_pairs"] = r.clients_without_scored_pairs;
  j["share_at_most_flag_of_all"] = r.share_at_most_flag_of_all;
  auto& langs = j["languages"] = nlohmann::json::array();
  for (const auto& l : r.languages) {
    langs.push_back({{"language", l.language},
                     {"utterances_total", l.utterances_total},
                     {"utterances_excluded", l.utterances_excluded},
                     {"loss_proportion", l.loss_proportion}});
  }
  auto& clients = j["clients"] = nlohmann::json::array();
  for (const auto& c : r.clients) {
    clients.push_back({{"language", c.language},
                       {"client_id", c.client_id},
                       {"scored", c.scored},
                       {"excluded", c.excluded},
                       {"loss_proportion", c.loss_proportion},
                       {"flagged", c.flagged}});
  }
  return j;
}

/// Aligned-column summary for terminals.
inline std::string format_report_text(const CleaningReport& r) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "language" << std::right << std::setw(12)
     << "scored" << std::setw(12) << "excluded" << std::setw(10) << "loss%"
     << '\n';
  os << std::fixed << std::setprecision(2);
  for (const auto& l : r.languages) {
    os << std::left << std::setw(12) << l.language << std::right
       << std::setw(12) << l.utterances_total << std::setw(12)
       << l.utterances_excluded << std::setw(10) << 100.0 * l.loss_proportion
       << '\n';
  }
  os << std::left << std::setw(12) << "TOTAL" << std::right << std::setw(12)
     << r.utterances_total << std::setw(12) << r.utterances_excluded << '\n';
  os << "median language loss: " << 100.0 * r.median_language_loss
     << "%, mean: " << 100.0 * r.mean_language_loss << "%\n";
  os << "languages with loss < " << 100.0 * r.flag_threshold
     << "%: " << r.languages_below_flag << " of " << r.languages.size()
     << '\n';
  os << "clients flagged (loss >= " << 100.0 * r.flag_threshold
     << "%): " << r.clients_flagged << " of " << r.clients_scored << '\n';
  os << "clients with loss <= " << 100.0 * r.flag_threshold
     << "%: " << r.clients_at_most_flag << " of " << r.clients_scored
     << " scored (" << 100.0 * r.share_at_most_flag_of_scored << "%), "
     << r.clients_at_most_flag + r.clients_without_scored_pairs << " of "
     << r.clients_in_manifests << " in manifests ("
     << 100.0 * r.share_at_most_flag_of_all << "%)\n";
  return os.str();
}

enum class ExportMode { kDropExcluded, kAnnotateOnly };

inline constexpr std::string_view kScoreColumn = "similarity_score";
inline constexpr std::string_view kDecisionColumn = "decision";

/// Re-emits the manifest. Annotate mode appends similarity_score and
/// decision columns (overwriting them if already present); drop mode
/// removes excluded rows and leaves columns untouched. Rows of singleton
/// clients carry the decision "singleton_client".
inline std::string export_cleaned_manifest(
    const LanguageManifest& m, std::span<const CleaningDecision> decisions,
    ExportMode mode) {
  std::map<std::string_view, const CleaningDecision*> by_id;
  for (const auto& d : decisions) {
    if (d.language == m.language) by_id[d.utterance_id] = &d;
  }
  const auto tags = mark_eligibility(m);

  auto columns = m.columns;
  std::optional<std::size_t> score_col, decision_col;
  if (mode == ExportMode::kAnnotateOnly) {
    score_col = m.column(kScoreColumn);
    if (!score_col) {
      score_col = columns.size();
      columns.emplace_back(kScoreColumn);
    }
    decision_col = m.column(kDecisionColumn);
    if (!decision_col) {
      decision_col = columns.size();
      columns.emplace_back(kDecisionColumn);
    }
  }

  std::string out = text::join(columns, '\t');
  out.push_back('\n');
  for (std::size_t i = 0; i < m.records.size(); ++i) {
    const auto& r = m.records[i];
    const auto it = by_id.find(r.utterance_id);
    const CleaningDecision* d = it == by_id.end() ? nullptr : it->second;
    if (!d && tags[i] != Eligibility::kSingletonClient) {
      throw ConsistencyError("no decision for scorable utterance '" +
                             r.utterance_id + "'");
    }
    if (mode == ExportMode::kDropExcluded) {
      if (d && d->decision == Decision::kExclude) continue;
      out += text::join(r.fields, '\t');
    } else {
      auto fields = r.fields;
      fields.resize(columns.size());
      fields[*score_col] = d && d->score ? text::format_fixed(*d->score, 6) : "";
      fields[*decision_col] =
          d ? std::string(to_string(d->decision)) : "singleton_client";
      out += text::join(fields, '\t');
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace cvclean
