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

// Logistic calibration of same-speaker judgments against similarity score,
// crossover threshold, and FAR/FRR/EER sweeps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cvclean/audit.hpp"
#include "cvclean/error.hpp"
#include "cvclean/log.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

struct BinaryTrial {
  double score = 0.0;
  int outcome = 0;  // 1 = same speaker, 0 = different speaker
  std::string annotator;
  std::string language;
  std::string trial_id;
};

struct BinaryTrialSet {
  std::vector<BinaryTrial> trials;
  std::array<std::size_t, kNumLabels> dropped{};  // per label, by kAllLabels
  std::size_t skipped_round_two = 0;
};

/// Joins labels to scored trials and keeps same/different judgments.
/// Labels whose trial id is in `ignore` (e.g. round-two trials) are
/// skipped; any other unknown trial id is a consistency error.
inline BinaryTrialSet build_binary_trials(
    std::span<const AuditLabel> labels, std::span<const ScoredTrial> scored,
    const std::set<std::string>& ignore = {}) {
  std::map<std::string_view, const ScoredTrial*> by_id;
  for (const auto& s : scored) by_id[s.trial_id] = &s;
  BinaryTrialSet out;
  for (const auto& l : labels) {
    if (ignore.count(l.trial_id)) {
      ++out.skipped_round_two;
      continue;
    }
    const auto it = by_id.find(l.trial_id);
    if (it == by_id.end()) {
      throw ConsistencyError("label references unknown trial '" + l.trial_id +
                             "'");
    }
    if (l.label != Label::kSameSpeaker && l.label != Label::kDifferentSpeaker) {
      ++out.dropped[static_cast<std::size_t>(l.label)];
      continue;
    }
    out.trials.push_back({it->second->score,
                          l.label == Label::kSameSpeaker ? 1 : 0, l.annotator,
                          it->second->language, l.trial_id});
  }
  std::size_t dropped = 0;
  for (auto d : out.dropped) dropped += d;
  if (dropped) {
    log::info("build_binary_trials: dropped " + std::to_string(dropped) +
              " label(s) that are neither same_speaker nor different_speaker");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Logistic regression

struct LogisticOptions {
  double ridge = 0.0;  // L2 penalty on the slope only
  std::size_t max_iterations = 200;
  double step_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  double divergence_norm = 1e6;
};

struct LogisticFit {
  double beta0 = 0.0;
  double beta1 = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  double log_likelihood = 0.0;
  double gradient_norm = 0.0;
  std::size_t n = 0;
  std::size_t n_positive = 0;
};

namespace detail {

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// Bernoulli log-likelihood of P(y=1) = sigmoid(beta0 + beta1 * s), minus
/// the slope penalty ridge/2 * beta1^2.
inline double log_likelihood(std::span<const BinaryTrial> trials, double beta0,
                             double beta1, double ridge = 0.0) {
  double ll = 0.0;
  for (const auto& t : trials) {
    const double eta = beta0 + beta1 * t.score;
    ll += t.outcome * eta - detail::softplus(eta);
  }
  return ll - 0.5 * ridge * beta1 * beta1;
}

inline std::array<double, 2> log_likelihood_gradient(
    std::span<const BinaryTrial> trials, double beta0, double beta1,
    double ridge = 0.0) {
  double g0 = 0.0, g1 = 0.0;
  for (const auto& t : trials) {
    const double r = t.outcome - detail::sigmoid(beta0 + beta1 * t.score);
    g0 += r;
    g1 += r * t.score;
  }
  return {g0, g1 - ridge * beta1};
}

/// Maximum-likelihood logistic fit by Newton-Raphson with step halving.
inline LogisticFit fit_logistic(std::span<const BinaryTrial> trials,
                                const LogisticOptions& opt = {}) {
  if (trials.size() < 2) throw ContractError("fit_logistic: need >= 2 trials");
  std::size_t pos = 0;
  double lo1 = std::numeric_limits<double>::infinity(), hi1 = -lo1;
  double lo0 = lo1, hi0 = -lo1;
  for (const auto& t : trials) {
    if (t.outcome != 0 && t.outcome != 1) {
      throw ContractError("fit_logistic: outcome must be 0 or 1");
    }
    if (!std::isfinite(t.score)) throw ContractError("fit_logistic: bad score");
    if (t.outcome) {
      ++pos;
      lo1 = std::min(lo1, t.score);
      hi1 = std::max(hi1, t.score);
    } else {
      lo0 = std::min(lo0, t.score);
      hi0 = std::max(hi0, t.score);
    }
  }
  if (pos == 0 || pos == trials.size()) {
    throw ContractError("fit_logistic: both outcomes must be present");
  }
  if (std::min(lo0, lo1) == std::max(hi0, hi1)) {
    throw ContractError("fit_logistic: scores have zero variance");
  }
  if (opt.ridge <= 0.0 && (lo1 >= hi0 || hi1 <= lo0)) {
    throw SeparationError(
        "fit_logistic: a score threshold separates the outcomes; the "
        "maximum-likelihood estimate does not exist");
  }

  LogisticFit fit;
  fit.n = trials.size();
  fit.n_positive = pos;
  double b0 = 0.0, b1 = 0.0;
  double ll = log_likelihood(trials, b0, b1, opt.ridge);
  for (std::size_t it = 1; it <= opt.max_iterations; ++it) {
    fit.iterations = it;
    double g0 = 0, g1 = 0, h00 = 0, h01 = 0, h11 = 0;
    for (const auto& t : trials) {
      const double p = detail::sigmoid(b0 + b1 * t.score);
      const double r = t.outcome - p;
      const double w = p * (1.0 - p);
      g0 += r;
      g1 += r * t.score;
      h00 += w;
      h01 += w * t.score;
      h11 += w * t.score * t.score;
    }
    g1 -= opt.ridge * b1;
    h11 += opt.ridge;
    if (std::hypot(g0, g1) < opt.gradient_tolerance) {
      fit.converged = true;
      break;
    }
    // Newton direction: solve (negative Hessian) * d = gradient.
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0) || !std::isfinite(det)) break;
    double d0 = (h11 * g0 - h01 * g1) / det;
    double d1 = (h00 * g1 - h01 * g0) / det;

    // Near the optimum the likelihood gain falls below the rounding error
    // of the sum, so only a decrease beyond that noise triggers halving.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double step = 1.0;
    double next_ll = log_likelihood(trials, b0 + d0, b1 + d1, opt.ridge);
    while (next_ll < ll - slack && step > 1e-12) {
      step *= 0.5;
      next_ll = log_likelihood(trials, b0 + step * d0, b1 + step * d1, opt.ridge);
    }
    if (next_ll < ll - slack) break;  // no ascent possible
    b0 += step * d0;
    b1 += step * d1;
    ll = next_ll;
    if (std::hypot(b0, b1) > opt.divergence_norm) {
      throw SeparationError("fit_logistic: coefficients diverged");
    }
    if (std::max(std::abs(step * d0), std::abs(step * d1)) < opt.step_tolerance) {
      fit.converged = true;
      break;
    }
  }
  const auto g = log_likelihood_gradient(trials, b0, b1, opt.ridge);
  fit.beta0 = b0;
  fit.beta1 = b1;
  fit.log_likelihood = ll;
  fit.gradient_norm = std::hypot(g[0], g[1]);
  if (!fit.converged) {
    log::warn("fit_logistic: no convergence after " +
              std::to_string(fit.iterations) + " iterations");
  }
  return fit;
}

struct Crossover {
  double value = 0.0;
  bool in_range = false;    // value in [-1, 1]
  bool decreasing = false;  // beta1 < 0: probability falls with similarity
};

/// Score at which the fitted same-speaker probability is 0.5.
inline Crossover crossover(const LogisticFit& fit) {
  if (!fit.converged) throw ContractError("crossover: fit did not converge");
  if (fit.beta1 == 0.0 || !std::isfinite(fit.beta1)) {
    throw UndefinedCrossoverError("crossover: slope is zero");
  }
  Crossover c;
  c.value = -fit.beta0 / fit.beta1;
  c.in_range = c.value >= -1.0 && c.value <= 1.0;
  c.decreasing = fit.beta1 < 0.0;
  if (c.decreasing) {
    log::warn("crossover: negative slope, same-speaker probability decreases "
              "with similarity");
  }
  return c;
}

struct SubgroupFit {
  std::string key;
  std::size_t n = 0;
  std::optional<LogisticFit> fit;
  std::optional<Crossover> crossover;
  std::string error;
};

enum class SubgroupBy { kAnnotator, kLanguage };

/// Independent fixed-effects fits per annotator or per language. Failures
/// (separation, single outcome) are recorded rather than thrown.
inline std::vector<SubgroupFit> fit_subgroups(std::span<const BinaryTrial> trials,
                                              SubgroupBy by,
                                              const LogisticOptions& opt = {}) {
  std::map<std::string, std::vector<BinaryTrial>> groups;
  for (const auto& t : trials) {
    groups[by == SubgroupBy::kAnnotator ? t.annotator : t.language].push_back(t);
  }
  std::vector<SubgroupFit> out;
  for (const auto& [key, group] : groups) {
    SubgroupFit s;
    s.key = key;
    s.n = group.size();
    try {
      s.fit = fit_logistic(group, opt);
      s.crossover = crossover(*s.fit);
    } catch (const Error& e) {
      s.error = e.what();
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline nlohmann::json to_json(const LogisticFit& f) {
  return {{"beta0", f.beta0},
          {"beta1", f.beta1},
          {"converged", f.converged},
          {"iterations", f.iterations},
          {"log_likelihood", f.log_likelihood},
          {"gradient_norm", f.gradient_norm},
          {"n", f.n},
          {"n_positive", f.n_positive}};
}

inline nlohmann::json to_json(const Crossover& c) {
  return {{"threshold", c.value},
          {"in_range", c.in_range},
          {"decreasing", c.decreasing}};
}

inline nlohmann::json to_json(const SubgroupFit& s) {
  nlohmann::json j = {{"key", s.key}, {"n", s.n}};
  if (s.fit) j["fit"] = to_json(*s.fit);
  if (s.crossover) j["crossover"] = to_json(*s.crossover);
  if (!s.error.empty()) j["error"] = s.error;
  return j;
}

// ---------------------------------------------------------------------------
// Error rates

struct LabeledScore {
  double score = 0.0;
  bool same_speaker = false;
};

struct OperatingPoint {
  double threshold = 0.0;
  double far = 0.0;  // share of different-speaker trials accepted
  double frr = 0.0;  // share of same-speaker trials rejected

  bool operator==(const OperatingPoint&) const = default;
};

struct ErrorRates {
  std::vector<OperatingPoint> points;  // ascending threshold
  double eer = 0.0;
  double eer_threshold = 0.0;
  bool inverted = false;  // eer > 0.5
};

/// Sweeps a threshold over every distinct score (accept iff score >= t),
/// plus a final reject-everything point just above the maximum. The EER is
/// read off by linear interpolation where FAR - FRR changes sign.
inline ErrorRates compute_eer(std::span<const LabeledScore> trials) {
  std::vector<LabeledScore> sorted(trials.begin(), trials.end());
  std::size_t n_same = 0;
  for (const auto& t : sorted) {
    if (!std::isfinite(t.score)) throw ContractError("compute_eer: bad score");
    n_same += t.same_speaker;
  }
  const std::size_t n_diff = sorted.size() - n_same;
  if (n_same == 0 || n_diff == 0) {
    throw ContractError("compute_eer: both classes must be present");
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) {
              return a.score < b.score;
            });

  ErrorRates er;
  std::size_t same_below = 0, diff_below = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    const double t = sorted[i].score;
    er.points.push_back(
        {t, static_cast<double>(n_diff - diff_below) / static_cast<double>(n_diff),
         static_cast<double>(same_below) / static_cast<double>(n_same)});
    for (; i < sorted.size() && sorted[i].score == t; ++i) {
      (sorted[i].same_speaker ? same_below : diff_below) += 1;
    }
  }
  er.points.push_back({std::nextafter(sorted.back().score,
                                      std::numeric_limits<double>::infinity()),
                       0.0, 1.0});

  for (std::size_t k = 0; k < er.points.size(); ++k) {
    const auto& p = er.points[k];
    const double d = p.far - p.frr;
    if (d > 0.0) continue;
    if (d == 0.0 || k == 0) {
      er.eer = p.far;
      er.eer_threshold = p.threshold;
    } else {
      const auto& q = er.points[k - 1];
      const double dq = q.far - q.frr;
      const double alpha = dq / (dq - d);
      er.eer = q.far + alpha * (p.far - q.far);
      er.eer_threshold = q.threshold + alpha * (p.threshold - q.threshold);
    }
    break;
  }
  er.inverted = er.eer > 0.5;
  if (er.inverted) {
    log::warn("compute_eer: EER above 0.5, scorer looks inverted");
  }
  return er;
}

inline std::string format_operating_points(const ErrorRates& er) {
  std::string out = "threshold\tfar\tfrr\n";
  for (const auto& p : er.points) {
    out += text::format_fixed(p.threshold, 9) + '\t' +
           text::format_fixed(p.far, 9) + '\t' + text::format_fixed(p.frr, 9) +
           '\n';
  }
  return out;
}

}  // namespace cvclean
