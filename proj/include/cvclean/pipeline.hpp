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

#include <span>
#include <vector>

#include "cvclean/cleaning.hpp"
#include "cvclean/corpus.hpp"
#include "cvclean/embedding.hpp"
#include "cvclean/scoring.hpp"

namespace cvclean {

/// Eligibility, enrollment selection and pair generation for one manifest.
inline std::vector<ScoredPair> build_pairs(const LanguageManifest& m) {
  const auto tags = mark_eligibility(m);
  return generate_pairs(m, select_enrollment(m, tags), tags);
}

/// Pairs for every manifest, scored against one provider.
template <EmbeddingProvider P>
std::vector<ScoredPair> score_manifests(std::span<const LanguageManifest> manifests,
                                        const P& provider, unsigned threads = 1) {
  std::vector<ScoredPair> all;
  for (const auto& m : manifests) {
    auto pairs = build_pairs(m);
    all.insert(all.end(), std::make_move_iterator(pairs.begin()),
               std::make_move_iterator(pairs.end()));
  }
  return score_pairs(std::move(all), provider, threads);
}

struct CleaningRun {
  std::vector<ScoredPair> pairs;
  std::vector<CleaningDecision> decisions;
  CleaningReport report;
};

/// ingest -> score -> threshold -> report.
template <EmbeddingProvider P>
CleaningRun run_cleaning(std::span<const LanguageManifest> manifests,
                         const P& provider, const ThresholdPolicy& policy,
                         double flag_threshold = kDefaultFlagThreshold) {
  CleaningRun run;
  run.pairs = score_manifests(manifests, provider);
  run.decisions = apply_threshold(run.pairs, policy);
  run.report = data_loss_report(run.decisions, manifests, flag_threshold);
  return run;
}

}  // namespace cvclean
