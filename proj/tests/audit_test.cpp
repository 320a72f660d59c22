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
#include "cvclean/audit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <thread>

#include "cvclean/label_store.hpp"
#include "cvclean/log.hpp"

namespace cvclean {
namespace {

// Pairwise-agreement oracle: P_i is the share of agreeing ordered rater
// pairs; P_e from pooled marginals.
double kappa_oracle(const std::vector<std::vector<std::size_t>>& ratings,
                    std::size_t k) {
  double p_sum = 0.0;
  std::vector<double> marg(k, 0.0);
  double n = 0.0;
  for (const auto& s : ratings) {
    double agree = 0.0, pairs = 0.0;
    for (std::size_t a = 0; a < s.size(); ++a) {
      marg[s[a]] += 1.0;
      n += 1.0;
      for (std::size_t b = 0; b < s.size(); ++b) {
        if (a == b) continue;
        pairs += 1.0;
        agree += s[a] == s[b];
      }
    }
    p_sum += agree / pairs;
  }
  double pe = 0.0;
  for (double m : marg) pe += (m / n) * (m / n);
  const double p_bar = p_sum / static_cast<double>(ratings.size());
  return (p_bar - pe) / (1.0 - pe);
}

TEST(FleissKappa, PerfectAgreement) {
  std::vector<std::vector<std::size_t>> r = {{0, 0}, {1, 1}, {0, 0}, {1, 1}};
  EXPECT_DOUBLE_EQ(fleiss_kappa(r, 2).kappa, 1.0);
}

TEST(FleissKappa, AllOneCategoryIsOne) {
  std::vector<std::vector<std::size_t>> r = {{2, 2, 2}, {2, 2, 2}};
  EXPECT_EQ(fleiss_kappa(r, 5).kappa, 1.0);
}

TEST(FleissKappa, SmallWorkedCase) {
  std::vector<std::vector<std::size_t>> r = {{0, 0}, {0, 1}, {1, 1}};
  EXPECT_NEAR(fleiss_kappa(r, 2).kappa, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(kappa_oracle(r, 2), 1.0 / 3.0, 1e-12);
}

TEST(FleissKappa, SystematicDisagreementIsNegative) {
  std::vector<std::vector<std::size_t>> r = {{0, 1}, {1, 0}, {0, 1}, {1, 0}};
  EXPECT_DOUBLE_EQ(fleiss_kappa(r, 2).kappa, -1.0);
}

TEST(FleissKappa, MatchesOracleAndIsPermutationInvariant) {
  std::mt19937 gen(5);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 2 + gen() % 4, raters = 2 + gen() % 4, n = 2 + gen() % 30;
    std::vector<std::vector<std::size_t>> r(n);
    for (auto& s : r) {
      for (std::size_t j = 0; j < raters; ++j) s.push_back(gen() % k);
    }
    bool single = true;
    for (const auto& s : r) for (auto c : s) single &= c == r[0][0];
    if (single) continue;
    const double kappa = fleiss_kappa(r, k).kappa;
    EXPECT_NEAR(kappa, kappa_oracle(r, k), 1e-12);
    EXPECT_LE(kappa, 1.0);
    auto shuffled = r;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    for (auto& s : shuffled) std::shuffle(s.begin(), s.end(), gen);
    EXPECT_NEAR(fleiss_kappa(shuffled, k).kappa, kappa, 1e-12);
  }
}

TEST(FleissKappa, ShortSubjectsDroppedWithWarning) {
  log::ScopedCapture cap;
  std::vector<std::vector<std::size_t>> r = {{0, 0, 0}, {1, 1, 1}, {0, 1}};
  const auto res = fleiss_kappa(r, 2);
  EXPECT_EQ(res.dropped, 1u);
  EXPECT_EQ(res.n_subjects, 2u);
  EXPECT_EQ(res.n_raters, 3u);
  EXPECT_FALSE(cap.warnings.empty());
}

TEST(FleissKappa, InsufficientData) {
  std::vector<std::vector<std::size_t>> one = {{0, 1}};
  EXPECT_THROW(fleiss_kappa(one, 2), InsufficientDataError);
  std::vector<std::vector<std::size_t>> single_rater = {{0}, {1}};
  EXPECT_THROW(fleiss_kappa(single_rater, 2), InsufficientDataError);
}

TEST(ScoreBin, Edges) {
  EXPECT_EQ(score_bin(-0.5), 0u);
  EXPECT_EQ(score_bin(0.0999), 0u);
  EXPECT_EQ(score_bin(0.1), 1u);
  EXPECT_EQ(score_bin(0.3999), 3u);
  EXPECT_EQ(score_bin(0.4), 4u);
  EXPECT_EQ(score_bin(0.5), 5u);
  EXPECT_EQ(score_bin(1.0), 5u);
}

// Pairs spread over every bin, per_cell of them in each (language, bin) cell.
std::vector<ScoredPair> bin_corpus(std::size_t languages, std::size_t per_cell) {
  std::vector<ScoredPair> pairs;
  const double centers[] = {0.05, 0.15, 0.25, 0.35, 0.45, 0.75};
  for (std::size_t l = 0; l < languages; ++l) {
    const std::string lang = "l" + std::to_string(100 + l);
    for (std::size_t b = 0; b < kNumScoreBins; ++b) {
      for (std::size_t i = 0; i < per_cell; ++i) {
        const std::string id = lang + "_" + std::to_string(b) + "_" + std::to_string(i);
        pairs.push_back({lang, "c" + id, "e" + id, "t" + id,
                         centers[b] + 0.0001 * static_cast<double>(i % 400),
                         PairStatus::kScored});
      }
    }
  }
  return pairs;
}

TEST(SampleRound1, CountsAndAssignment) {
  const auto pairs = bin_corpus(76, 12);
  auto s = sample_round1(pairs, 5, 42);
  EXPECT_EQ(s.trials.size(), 2280u);
  EXPECT_TRUE(s.shortfalls.empty());
  std::map<std::pair<std::string, std::size_t>, std::size_t> cells;
  for (const auto& t : s.scored) ++cells[{t.language, t.bin}];
  EXPECT_EQ(cells.size(), 76u * 6u);
  for (const auto& [k, v] : cells) EXPECT_EQ(v, 5u);

  const std::vector<std::string> annotators = {"a1", "a2", "a3", "a4", "a5"};
  assign_annotators(s.trials, annotators);
  std::map<std::string, std::set<std::string>> langs_of;
  for (const auto& t : s.trials) {
    ASSERT_EQ(t.assignees.size(), 1u);
    langs_of[t.assignees[0]].insert(t.language);
  }
  std::vector<std::size_t> sizes;
  for (const auto& [a, ls] : langs_of) sizes.push_back(ls.size());
  std::sort(sizes.rbegin(), sizes.rend());
  EXPECT_EQ(sizes, (std::vector<std::size_t>{16, 15, 15, 15, 15}));
}

TEST(SampleRound1, DeterministicAndSeedSensitive) {
  const auto pairs = bin_corpus(4, 30);
  const auto a = sample_round1(pairs, 5, 7);
  const auto b = sample_round1(pairs, 5, 7);
  const auto c = sample_round1(pairs, 5, 8);
  EXPECT_EQ(format_jsonl<AuditTrial>(a.trials), format_jsonl<AuditTrial>(b.trials));
  EXPECT_NE(format_jsonl<AuditTrial>(a.trials), format_jsonl<AuditTrial>(c.trials));
  // No duplicates within a cell.
  std::set<std::string> ids;
  for (const auto& t : a.trials) EXPECT_TRUE(ids.insert(t.trial_id).second);
}

TEST(SampleRound1, AddingALanguageLeavesOthersUnchanged) {
  auto pairs = bin_corpus(3, 20);
  const auto before = sample_round1(pairs, 5, 3);
  auto more = bin_corpus(4, 20);
  const auto after = sample_round1(more, 5, 3);
  std::set<std::string> a, b;
  for (const auto& t : before.trials) a.insert(t.trial_id);
  for (const auto& t : after.trials) if (t.language != "l103") b.insert(t.trial_id);
  EXPECT_EQ(a, b);
}

TEST(SampleRound1, ShortfallTakesWholeBinAndWarns) {
  std::vector<ScoredPair> pairs = {
      {"xx", "c", "e", "t1", 0.05, PairStatus::kScored},
      {"xx", "c", "e", "t2", 0.06, PairStatus::kScored},
      {"xx", "c", "e", "t3", 0.9, PairStatus::kScored},
      {"yy", "c", "e", "t4", std::nullopt, PairStatus::kMissingTestEmbedding},
  };
  log::ScopedCapture cap;
  const auto s = sample_round1(pairs, 5, 1);
  EXPECT_EQ(s.trials.size(), 3u);
  EXPECT_EQ(s.shortfalls.size(), 6u);
  EXPECT_EQ(s.skipped_languages, std::vector<std::string>{"yy"});
  EXPECT_GE(cap.warnings.size(), 7u);
}

TEST(AuditTrial, BlindedSerialization) {
  const auto pairs = bin_corpus(1, 6);
  const auto s = sample_round1(pairs, 5, 1);
  const auto text = format_jsonl<AuditTrial>(s.trials);
  for (const char* leak : {"score", "bin", "client"}) {
    EXPECT_EQ(text.find(leak), std::string::npos) << leak;
  }
  for (const auto& t : s.scored) {
    EXPECT_EQ(text.find(std::to_string(t.score).substr(0, 6)), std::string::npos);
  }
  const auto back = parse_jsonl(text, trial_from_json);
  EXPECT_EQ(back, s.trials);
  const auto scored_back =
      parse_jsonl(format_jsonl<ScoredTrial>(s.scored), scored_trial_from_json);
  ASSERT_EQ(scored_back.size(), s.scored.size());
  EXPECT_EQ(scored_back[0].score, s.scored[0].score);
}

TEST(SampleRound2, ReauditStructure) {
  const auto pairs = bin_corpus(10, 10);
  auto s = sample_round1(pairs, 5, 11);
  const std::vector<std::string> annotators = {"a1", "a2", "a3", "a4", "a5"};
  assign_annotators(s.trials, annotators);
  std::vector<AuditLabel> labels;
  for (const auto& t : s.trials) labels.push_back({t.trial_id, t.assignees[0], Label::kSameSpeaker, ""});
  const auto r2 = sample_round2(s.trials, labels, annotators, 30, 11);
  EXPECT_EQ(r2.size(), 150u);
  std::map<std::string, std::size_t> per_origin;
  std::set<std::string> ids;
  for (const auto& t : r2) {
    EXPECT_EQ(t.round, AuditRound::kTwo);
    EXPECT_EQ(t.assignees.size(), 4u);
    EXPECT_EQ(std::count(t.assignees.begin(), t.assignees.end(), *t.origin_annotator), 0);
    EXPECT_EQ(t.trial_id, round_two_trial_id(*t.source_trial_id));
    EXPECT_TRUE(ids.insert(t.trial_id).second);
    ++per_origin[*t.origin_annotator];
  }
  for (const auto& [a, n] : per_origin) EXPECT_EQ(n, 30u);
  EXPECT_EQ(sample_round2(s.trials, labels, annotators, 30, 11), r2);
}

TEST(SampleRound2, FewerLabelsThanRequested) {
  std::vector<AuditTrial> r1 = {{"t1", AuditRound::kOne, "en", "e", "x", {"a"}, {}, {}},
                                {"t2", AuditRound::kOne, "en", "e", "y", {"a"}, {}, {}}};
  std::vector<AuditLabel> labels = {{"t1", "a", Label::kNotSure, ""}};
  const std::vector<std::string> annotators = {"a", "b"};
  log::ScopedCapture cap;
  const auto r2 = sample_round2(r1, labels, annotators, 30, 1);
  ASSERT_EQ(r2.size(), 1u);
  EXPECT_EQ(r2[0].assignees, std::vector<std::string>{"b"});
}

TEST(RoundTwoRatings, IncludesOriginLabelAndFeedsKappa) {
  std::vector<AuditTrial> trials = {
      {"r1", AuditRound::kTwo, "en", "e", "x", {"b", "c"}, "a", "t1"},
      {"r2", AuditRound::kTwo, "en", "e", "y", {"b", "c"}, "a", "t2"},
      {"r3", AuditRound::kTwo, "en", "e", "z", {"b", "c"}, "a", "t3"}};
  std::vector<AuditLabel> labels = {
      {"t1", "a", Label::kSameSpeaker, ""},      {"r1", "b", Label::kSameSpeaker, ""},
      {"r1", "c", Label::kSameSpeaker, ""},      {"t2", "a", Label::kDifferentSpeaker, ""},
      {"r2", "b", Label::kDifferentSpeaker, ""}, {"r2", "c", Label::kSameSpeaker, ""},
      {"t3", "a", Label::kSameSpeaker, ""},      {"r3", "b", Label::kNotSure, ""},
      {"r3", "c", Label::kSameSpeaker, ""}};
  const std::vector<Label> binary = {Label::kSameSpeaker, Label::kDifferentSpeaker};
  const auto r = round_two_ratings(trials, labels, binary);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_EQ(r[0], (std::vector<std::size_t>{0, 0, 0}));
  EXPECT_EQ(r[1], (std::vector<std::size_t>{1, 1, 0}));
  EXPECT_EQ(r[2].size(), 2u);  // not_sure falls outside the binary set
  const auto res = fleiss_kappa(r, binary.size());
  EXPECT_EQ(res.dropped, 1u);
  const std::vector<std::vector<std::size_t>> kept = {r[0], r[1]};
  EXPECT_NEAR(res.kappa, kappa_oracle(kept, 2), 1e-12);
}

TEST(LabelDistribution, SharesAndBins) {
  std::vector<ScoredTrial> scored = {{"t1", "en", "c", "e", "x", 0.05, 0},
                                     {"t2", "en", "c", "e", "y", 0.7, 5}};
  std::vector<AuditLabel> labels = {{"t1", "a", Label::kDifferentSpeaker, ""},
                                    {"t2", "a", Label::kSameSpeaker, ""},
                                    {"t2", "b", Label::kNotSure, ""}};
  const auto d = label_distribution(labels);
  EXPECT_EQ(d.total, 3u);
  EXPECT_DOUBLE_EQ(d.shares[0], 1.0 / 3.0);
  const auto by_bin = label_distribution_by_bin(labels, scored);
  EXPECT_EQ(by_bin[5].total, 2u);
  EXPECT_EQ(by_bin[0].counts[1], 1u);
  EXPECT_EQ(by_bin[2].total, 0u);
  std::vector<AuditLabel> none;
  EXPECT_THROW(label_distribution(none), EmptyInputError);
  labels.push_back({"zz", "a", Label::kNotSure, ""});
  EXPECT_THROW(label_distribution_by_bin(labels, scored), ConsistencyError);
}

TEST(LabelJson, RejectsUnknownLabel) {
  EXPECT_THROW(parse_jsonl(R"({"trial_id":"t","annotator":"a","label":"maybe"})",
                           label_from_json),
               RowError);
}

std::string temp_path(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() /
           ("cvclean_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove(p);
  return p.string();
}

TEST(LabelStore, DuplicateRejectedAndPersisted) {
  const auto path = temp_path("labels");
  {
    LabelStore store(path);
    EXPECT_EQ(store.submit({"t1", "a", Label::kSameSpeaker, ""}), SubmitResult::kAccepted);
    EXPECT_EQ(store.submit({"t1", "a", Label::kDifferentSpeaker, ""}), SubmitResult::kDuplicate);
    EXPECT_EQ(store.submit({"t1", "b", Label::kDifferentSpeaker, ""}), SubmitResult::kAccepted);
  }
  LabelStore reopened(path);
  EXPECT_EQ(reopened.size(), 2u);
  EXPECT_EQ(reopened.snapshot()[0].label, Label::kSameSpeaker);
  EXPECT_EQ(reopened.submit({"t1", "a", Label::kNotSure, ""}), SubmitResult::kDuplicate);
  std::filesystem::remove(path);
}

TEST(LabelStore, ConcurrentSubmitsAcceptExactlyOne) {
  const auto path = temp_path("concurrent");
  LabelStore store(path);
  std::atomic<int> accepted{0};
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] {
      for (int k = 0; k < 20; ++k) {
        if (store.submit({"t" + std::to_string(k), "a", Label::kSameSpeaker, ""}) ==
            SubmitResult::kAccepted) {
          ++accepted;
        }
      }
    });
  }
  threads.clear();
  EXPECT_EQ(accepted.load(), 20);
  EXPECT_EQ(load_labels(path).size(), 20u);
  std::filesystem::remove(path);
}

TEST(LabelStore, CorruptDuplicateFileRejected) {
  const auto path = temp_path("corrupt");
  text::write_file(path,
                   "{\"trial_id\":\"t\",\"annotator\":\"a\",\"label\":\"not_sure\"}\n"
                   "{\"trial_id\":\"t\",\"annotator\":\"a\",\"label\":\"not_sure\"}\n");
  EXPECT_THROW(LabelStore{path}, DuplicationError);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace cvclean
