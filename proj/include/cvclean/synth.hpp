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

// Synthetic corpora with known speaker identity and controlled client-ID
// contamination, and scoring of cleaning decisions against that truth.

#include <algorithm>
#include <array>
#include <cmath>
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

#include "cvclean/calibration.hpp"
#include "cvclean/cleaning.hpp"
#include "cvclean/corpus.hpp"
#include "cvclean/embedding.hpp"
#include "cvclean/error.hpp"
#include "cvclean/random.hpp"

namespace cvclean {

struct SynthConfig {
  std::size_t n_speakers = 10;
  std::size_t utts_per_speaker = 10;
  std::size_t dim = 64;
  double noise_sigma = 0.25;
  double contamination_rate = 0.0;
  double contamination_fraction = 0.3;
  std::uint64_t seed = 0;
  std::string language = "synth";
  /// Optional explicit speaker mean directions (one per speaker, length
  /// dim). Sampled uniformly on the sphere when empty.
  std::vector<std::vector<double>> speaker_means;
  /// Let a contaminated client's final (enrollment) row come from the
  /// donor. Off by default.
  bool contaminate_enrollment = false;
};

struct GroundTruth {
  std::map<std::string, std::string> speaker_of;  // utterance -> speaker
  std::map<std::string, std::set<std::string>> speakers_of_client;

  /// Recomputes speakers_of_client from a manifest.
  void refresh(const LanguageManifest& m) {
    speakers_of_client.clear();
    for (const auto& r : m.records) {
      const auto it = speaker_of.find(r.utterance_id);
      if (it == speaker_of.end()) {
        throw ConsistencyError("no truth for utterance '" + r.utterance_id + "'");
      }
      speakers_of_client[r.client_id].insert(it->second);
    }
  }
};

struct SynthCorpus {
  LanguageManifest manifest;
  EmbeddingTable table{1};
  GroundTruth truth;
};

namespace detail {

inline std::string numbered(std::string_view prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, i);
  return std::string(prefix) + buf;
}

inline std::vector<double> normalized(std::vector<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double n = std::sqrt(n2);
  for (double& x : v) x /= n;
  return v;
}

inline std::vector<double> random_direction(Rng& rng, std::size_t dim) {
  while (true) {
    std::vector<double> v(dim);
    double n2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      n2 += x * x;
    }
    if (n2 > 1e-24) return normalized(std::move(v));
  }
}

inline constexpr std::array<std::string_view, 24> kWords = {
    "river", "stone", "light",  "open",  "green",  "window", "quiet", "north",
    "garden", "field", "bright", "small", "winter", "market", "seven", "table",
    "garden", "slow", "cloud",  "early", "yellow", "bridge", "story", "warm"};

inline void set_client(LanguageManifest& m, UtteranceRecord& r,
                       const std::string& client) {
  r.client_id = client;
  if (const auto col = m.column("client_id")) r.fields[*col] = client;
}

}  // namespace detail

/// One client per speaker, utterances grouped by client in manifest order.
/// Embeddings are normalize(mean + sigma * z) with z standard normal.
inline SynthCorpus generate_corpus(const SynthConfig& cfg) {
  if (cfg.dim < 2) throw ContractError("generate_corpus: dim must be >= 2");
  if (cfg.n_speakers == 0 || cfg.utts_per_speaker == 0) {
    throw ContractError("generate_corpus: need speakers and utterances");
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma)) {
    throw ContractError("generate_corpus: noise_sigma must be >= 0");
  }
  if (!cfg.speaker_means.empty() && cfg.speaker_means.size() != cfg.n_speakers) {
    throw ContractError("generate_corpus: one mean per speaker required");
  }

  Rng mean_rng(derive_seed(cfg.seed, "means"));
  Rng utt_rng(derive_seed(cfg.seed, "utterances"));
  Rng text_rng(derive_seed(cfg.seed, "sentences"));

  SynthCorpus c;
  c.table = EmbeddingTable(cfg.dim);
  auto& m = c.manifest;
  m.language = cfg.language;
  m.policy = {TokenizerMode::kWhitespace, cfg.language};
  m.source_version = "synthetic seed=" + std::to_string(cfg.seed);
  m.columns = {"client_id", "path", "sentence", "locale"};

  std::size_t row = 0;
  for (std::size_t s = 0; s < cfg.n_speakers; ++s) {
    std::vector<double> mean;
    if (cfg.speaker_means.empty()) {
      mean = detail::random_direction(mean_rng, cfg.dim);
    } else {
      if (cfg.speaker_means[s].size() != cfg.dim) {
        throw ContractError("generate_corpus: mean has wrong dimension");
      }
      mean = detail::normalized(cfg.speaker_means[s]);
    }
    const std::string speaker = detail::numbered("spk_", s, 4);
    const std::string client = detail::numbered("client_", s, 4);
    for (std::size_t u = 0; u < cfg.utts_per_speaker; ++u, ++row) {
      std::vector<double> v(cfg.dim);
      for (std::size_t i = 0; i < cfg.dim; ++i) {
        v[i] = mean[i] + cfg.noise_sigma * utt_rng.normal();
      }
      double n2 = 0.0;
      for (double x : v) n2 += x * x;
      if (!(n2 > 0.0)) v = mean, n2 = 1.0;
      const double n = std::sqrt(n2);
      EmbeddingVector e;
      e.utterance_id = detail::numbered("clip_", row, 6) + ".wav";
      e.values.reserve(cfg.dim);
      for (double x : v) e.values.push_back(static_cast<float>(x / n));

      const std::size_t n_words = 3 + text_rng.uniform_index(6);
      std::string sentence;
      for (std::size_t w = 0; w < n_words; ++w) {
        if (w) sentence.push_back(' ');
        sentence += detail::kWords[text_rng.uniform_index(detail::kWords.size())];
      }

      UtteranceRecord r;
      r.client_id = client;
      r.utterance_id = e.utterance_id;
      r.sentence = sentence;
      r.language = cfg.language;
      r.token_count = count_tokens(sentence, m.policy);
      r.row_index = row;
      r.fields = {client, e.utterance_id, sentence, cfg.language};
      m.records.push_back(std::move(r));
      c.truth.speaker_of[e.utterance_id] = speaker;
      c.table.insert(std::move(e));
    }
  }
  c.truth.refresh(m);
  return c;
}

struct ContaminationResult {
  LanguageManifest manifest;
  GroundTruth truth;
  std::size_t clients_contaminated = 0;
  std::size_t utterances_moved = 0;
};

/// Moves ceil(fraction * k) utterances from a donor speaker's own client
/// into each of ceil(rate * n_clients) uniformly chosen clients, where k is
/// the receiving client's size. Donors are drawn uniformly among other
/// speakers whose remaining pool (non-final, not yet moved) is large
/// enough. Moved rows are placed just before the receiving client's
/// final row, so its enrollment is unchanged unless contaminate_enrollment.
inline ContaminationResult contaminate(const LanguageManifest& manifest,
                                       const GroundTruth& truth, double rate,
                                       double fraction, std::uint64_t seed,
                                       bool contaminate_enrollment = false) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw ContractError("contaminate: rate must be in [0, 1]");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ContractError("contaminate: fraction must be in (0, 1]");
  }
  std::set<std::string> speakers;
  for (const auto& [_, s] : truth.speaker_of) speakers.insert(s);
  if (speakers.size() < 2) throw ContractError("contaminate: need >= 2 speakers");

  ContaminationResult out{manifest, truth, 0, 0};
  auto& recs = out.manifest.records;

  // Client rows in manifest order; the final row is the enrollment.
  std::map<std::string, std::vector<std::size_t>> rows_of;
  for (std::size_t i = 0; i < recs.size(); ++i) rows_of[recs[i].client_id].push_back(i);
  const auto speaker_at = [&](std::size_t i) -> const std::string& {
    const auto it = truth.speaker_of.find(recs[i].utterance_id);
    if (it == truth.speaker_of.end()) {
      throw ConsistencyError("no truth for utterance '" + recs[i].utterance_id +
                             "'");
    }
    return it->second;
  };

  // Donor pools: non-final rows of a client spoken by its enrollment speaker.
  std::map<std::string, std::vector<std::size_t>> pool;
  std::map<std::string, std::string> client_speaker;
  for (const auto& [client, rows] : rows_of) {
    const std::string& spk = speaker_at(rows.back());
    client_speaker[client] = spk;
    for (std::size_t j = 0; j + 1 < rows.size(); ++j) {
      if (speaker_at(rows[j]) == spk) pool[spk].push_back(rows[j]);
    }
  }

  std::vector<std::string> clients;
  for (const auto& [client, _] : rows_of) clients.push_back(client);
  const auto n_selected = static_cast<std::size_t>(
      std::ceil(rate * static_cast<double>(clients.size()) - 1e-9));
  if (n_selected == 0) return out;

  Rng rng(derive_seed(seed, "contaminate"));
  std::map<std::size_t, std::vector<std::size_t>> moved_into;  // final row -> rows
  for (std::size_t idx : rng.sample_without_replacement(clients.size(), n_selected)) {
    const std::string& client = clients[idx];
    const auto& rows = rows_of.at(client);
    const auto m = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(rows.size()) - 1e-9));
    std::vector<std::string> donors;
    for (const auto& s : speakers) {
      if (s != client_speaker.at(client) && pool[s].size() >= m) donors.push_back(s);
    }
    if (donors.empty()) {
      throw GenerationError("contaminate: no donor speaker has " +
                            std::to_string(m) + " utterances left for '" +
                            client + "'");
    }
    auto& donor_pool = pool[donors[rng.uniform_index(donors.size())]];
    auto picks = rng.sample_without_replacement(donor_pool.size(), m);
    std::vector<std::size_t> taken;
    for (std::size_t p : picks) taken.push_back(donor_pool[p]);
    std::sort(picks.rbegin(), picks.rend());
    for (std::size_t p : picks) donor_pool.erase(donor_pool.begin() + p);
    std::sort(taken.begin(), taken.end());
    for (std::size_t row : taken) detail::set_client(out.manifest, recs[row], client);
    auto& dest = moved_into[rows.back()];
    dest.insert(dest.end(), taken.begin(), taken.end());
    ++out.clients_contaminated;
    out.utterances_moved += m;
  }

  std::set<std::size_t> moved;
  for (const auto& [_, rows] : moved_into) moved.insert(rows.begin(), rows.end());
  std::vector<UtteranceRecord> reordered;
  reordered.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (moved.count(i)) continue;
    const auto it = moved_into.find(i);
    if (it != moved_into.end() && !contaminate_enrollment) {
      for (std::size_t j : it->second) reordered.push_back(recs[j]);
    }
    reordered.push_back(recs[i]);
    if (it != moved_into.end() && contaminate_enrollment) {
      for (std::size_t j : it->second) reordered.push_back(recs[j]);
    }
  }
  for (std::size_t i = 0; i < reordered.size(); ++i) reordered[i].row_index = i;
  recs = std::move(reordered);
  out.truth.refresh(out.manifest);
  return out;
}

/// generate_corpus followed by contaminate with the config's parameters.
inline SynthCorpus generate_contaminated(const SynthConfig& cfg) {
  SynthCorpus c = generate_corpus(cfg);
  if (cfg.contamination_rate > 0.0) {
    auto res = contaminate(c.manifest, c.truth, cfg.contamination_rate,
                           cfg.contamination_fraction,
                           derive_seed(cfg.seed, "contamination"),
                           cfg.contaminate_enrollment);
    c.manifest = std::move(res.manifest);
    c.truth = std::move(res.truth);
  }
  return c;
}

struct CleaningEvaluation {
  std::size_t true_positives = 0;   // excluded intruders
  std::size_t false_positives = 0;  // excluded genuine utterances
  std::size_t false_negatives = 0;  // intruders not excluded
  std::size_t true_negatives = 0;
  double precision = 1.0;
  double recall = 1.0;
  double f1 = 1.0;
  std::optional<ErrorRates> oracle;  // absent when one class is missing
};

/// Scores exclusion decisions against the truth. An intruder is a test
/// utterance whose true speaker differs from the speaker of its client's
/// enrollment utterance.
inline CleaningEvaluation evaluate_cleaning(
    std::span<const CleaningDecision> decisions, const GroundTruth& truth) {
  const auto speaker = [&](const std::string& utt) -> const std::string& {
    const auto it = truth.speaker_of.find(utt);
    if (it == truth.speaker_of.end()) {
      throw ConsistencyError("truth has no entry for utterance '" + utt + "'");
    }
    return it->second;
  };
  std::map<std::pair<std::string, std::string>, std::string> enrolled;
  for (const auto& d : decisions) {
    if (d.decision == Decision::kEnrollmentKeep) {
      enrolled[{d.language, d.client_id}] = speaker(d.utterance_id);
    }
  }
  CleaningEvaluation ev;
  std::vector<LabeledScore> labeled;
  for (const auto& d : decisions) {
    if (d.decision == Decision::kEnrollmentKeep) continue;
    const auto it = enrolled.find({d.language, d.client_id});
    if (it == enrolled.end()) {
      throw ConsistencyError("no enrollment decision for client '" +
                             d.client_id + "'");
    }
    const bool intruder = speaker(d.utterance_id) != it->second;
    const bool excluded = d.decision == Decision::kExclude;
    if (excluded) {
      (intruder ? ev.true_positives : ev.false_positives) += 1;
    } else {
      (intruder ? ev.false_negatives : ev.true_negatives) += 1;
    }
    if (d.score) labeled.push_back({*d.score, !intruder});
  }
  const std::size_t excluded = ev.true_positives + ev.false_positives;
  const std::size_t intruders = ev.true_positives + ev.false_negatives;
  ev.precision = excluded ? static_cast<double>(ev.true_positives) /
                                static_cast<double>(excluded)
                          : 1.0;
  ev.recall = intruders ? static_cast<double>(ev.true_positives) /
                              static_cast<double>(intruders)
                        : 1.0;
  const double sum = ev.precision + ev.recall;
  ev.f1 = sum > 0.0 ? 2.0 * ev.precision * ev.recall / sum : 0.0;

  bool has_same = false, has_diff = false;
  for (const auto& l : labeled) (l.same_speaker ? has_same : has_diff) = true;
  if (has_same && has_diff) ev.oracle = compute_eer(labeled);
  return ev;
}

inline std::string format_truth(const GroundTruth& truth) {
  std::string out;
  for (const auto& [utt, spk] : truth.speaker_of) {
    out += nlohmann::json{{"utterance_id", utt}, {"speaker", spk}}.dump();
    out.push_back('\n');
  }
  return out;
}

inline GroundTruth parse_truth(std::string_view data) {
  GroundTruth t;
  for (const auto& line : text::split_lines(data)) {
    if (line.content.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line.content);
      const auto utt = j.at("utterance_id").get<std::string>();
      if (!t.speaker_of.emplace(utt, j.at("speaker").get<std::string>()).second) {
        throw DuplicationError("duplicate truth entry for '" + utt + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw RowError(line.number, e.what());
    }
  }
  return t;
}

}  // namespace cvclean
