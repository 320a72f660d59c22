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

// Command-line front end. Exit codes: 0 success, 1 data or consistency
// error, 2 usage error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cvclean/audit.hpp"
#include "cvclean/calibration.hpp"
#include "cvclean/cleaning.hpp"
#include "cvclean/corpus.hpp"
#include "cvclean/embedding.hpp"
#include "cvclean/error.hpp"
#include "cvclean/log.hpp"
#include "cvclean/pipeline.hpp"
#include "cvclean/scoring.hpp"
#include "cvclean/service.hpp"
#include "cvclean/synth.hpp"

namespace cvclean::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitUsage = 2;

namespace detail {

namespace fs = std::filesystem;

/// Common Voice layout: <corpus>/<language>/validated.tsv.
inline std::string infer_language(const std::string& manifest_path) {
  const auto dir = fs::path(manifest_path).parent_path().filename().string();
  if (dir.empty() || dir == "." || dir == "..") {
    throw ContractError("cannot infer language from '" + manifest_path +
                        "'; pass --language");
  }
  return dir;
}

inline std::vector<LanguageManifest> load_manifests(
    const std::vector<std::string>& paths, const std::string& language,
    const std::vector<std::string>& whitespaceless) {
  if (!language.empty() && paths.size() > 1) {
    throw ContractError("--language applies to a single --manifest");
  }
  std::set<std::string> nows = default_whitespaceless_languages();
  if (!whitespaceless.empty()) nows = {whitespaceless.begin(), whitespaceless.end()};
  std::vector<LanguageManifest> out;
  std::set<std::string> seen;
  for (const auto& p : paths) {
    const std::string lang = language.empty() ? infer_language(p) : language;
    if (!seen.insert(lang).second) {
      throw DuplicationError("two manifests for language '" + lang + "'");
    }
    out.push_back(load_manifest(p, lang, default_policy(lang, nows)));
    log::info("loaded " + std::to_string(out.back().records.size()) +
              " utterances for " + lang + " from " + p);
  }
  return out;
}

inline EmbeddingTable load_tables(const std::vector<std::string>& paths) {
  EmbeddingTable merged = load_embedding_table(paths.at(0));
  for (std::size_t i = 1; i < paths.size(); ++i) {
    const EmbeddingTable t = load_embedding_table(paths[i]);
    if (t.dim() != merged.dim()) {
      throw FormatError("embedding tables disagree on dimension");
    }
    for (const auto& [_, v] : t.entries()) merged.insert(v);
  }
  log::info("loaded " + std::to_string(merged.size()) + " embeddings of dim " +
            std::to_string(merged.dim()));
  return merged;
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create " + dir + ": " + ec.message());
}

inline void write_json(const std::string& path, const nlohmann::json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    text::write_file(path, j.dump(2) + "\n");
  }
}

inline nlohmann::json to_json(const ScoreSummary& s) {
  return {{"language", s.language}, {"n", s.n},       {"q1", s.q1},
          {"median", s.median},     {"q3", s.q3},     {"iqr", s.iqr},
          {"histogram_lower", -1.0}, {"histogram_width", kHistogramWidth},
          {"histogram", s.histogram}};
}

inline nlohmann::json to_json(const AgreementResult& a) {
  return {{"kappa", a.kappa},
          {"n_subjects", a.n_subjects},
          {"n_raters", a.n_raters},
          {"n_categories", a.n_categories},
          {"dropped", a.dropped}};
}

inline nlohmann::json to_json(const LabelDistribution& d) {
  nlohmann::json j = {{"total", d.total}};
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    j["shares"][std::string(to_string(kAllLabels[i]))] = d.shares[i];
    j["counts"][std::string(to_string(kAllLabels[i]))] = d.counts[i];
  }
  return j;
}

inline std::vector<Label> parse_categories(const std::vector<std::string>& names) {
  std::vector<Label> out;
  for (const auto& n : names) {
    const auto l = parse_label(n);
    if (!l) throw ContractError("unknown label category '" + n + "'");
    out.push_back(*l);
  }
  if (out.empty()) out.assign(kAllLabels.begin(), kAllLabels.end());
  return out;
}

}  // namespace detail

/// Parses argv and runs one subcommand.
inline int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"cvclean: speaker-heterogeneity scoring and cleaning for "
               "crowdsourced speech corpora"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress informational logs");

  const auto existing = CLI::ExistingFile;
  std::vector<std::string> manifests, embeddings, whitespaceless, annotators,
      categories;
  std::string language, out, out_dir, pairs_path, trials_path, labels_path,
      scored_path, truth_path, scores_path, clips_dir, ui_dir, host = "127.0.0.1",
      mode = "annotate", provenance = "audited_crossover";
  std::uint64_t seed = 0;
  std::size_t per_bin = 5, n_per_annotator = 30, round = 1;
  unsigned threads = 1;
  double tau = kAuditedThreshold, flag_threshold = kDefaultFlagThreshold,
         ridge = 0.0;
  int port = 8080;
  SynthConfig synth;

  auto add_manifest_opts = [&](CLI::App* sub) {
    sub->add_option("--manifest", manifests, "Validated-utterance TSV (repeatable)")
        ->required()
        ->check(existing);
    sub->add_option("--language", language,
                    "Language code (default: manifest's directory name)");
    sub->add_option("--whitespaceless", whitespaceless,
                    "Languages tokenized per character (replaces the default list)")
        ->delimiter(',');
  };

  auto* ingest = app.add_subcommand("ingest", "Parse manifests and tag eligibility");
  add_manifest_opts(ingest);
  ingest->add_option("--out", out, "Eligibility TSV (default stdout)");

  auto* score = app.add_subcommand("score", "Score test utterances against enrollments");
  add_manifest_opts(score);
  score->add_option("--embeddings", embeddings, "Embedding table (repeatable)")
      ->required()
      ->check(existing);
  score->add_option("--out", out, "Scored-pair TSV")->required();
  score->add_option("--threads", threads, "Scoring threads");

  auto* report = app.add_subcommand("report", "Score distribution summaries");
  report->add_option("--pairs", pairs_path, "Scored-pair TSV")->required()->check(existing);
  report->add_option("--out", out, "Summary JSON (default stdout)");

  auto* sample = app.add_subcommand("sample-audit", "Sample audit trials");
  sample->add_option("--round", round, "Audit round (1 or 2)")->check(CLI::Range(1, 2));
  sample->add_option("--pairs", pairs_path, "Scored-pair TSV (round 1)")->check(existing);
  sample->add_option("--trials", trials_path, "Round-one trials JSONL (round 2)")
      ->check(existing);
  sample->add_option("--labels", labels_path, "Round-one labels JSONL (round 2)")
      ->check(existing);
  sample->add_option("--annotators", annotators, "Annotator roster, in order")
      ->required()
      ->delimiter(',');
  sample->add_option("--seed", seed, "Sampling seed")->required();
  sample->add_option("--per-bin", per_bin, "Pairs per score bin and language");
  sample->add_option("--n-per-annotator", n_per_annotator,
                     "Round-two trials re-sampled per annotator");
  sample->add_option("--out", out, "Trials JSONL (annotator-facing)")->required();
  sample->add_option("--scored-out", scored_path,
                     "Scored trial table JSONL (round 1; never served)");

  auto* serve = app.add_subcommand("serve", "Run the audit HTTP service");
  serve->add_option("--trials", trials_path, "Trials JSONL")->required()->check(existing);
  serve->add_option("--labels", labels_path, "Label store JSONL (created if absent)")
      ->required();
  serve->add_option("--clips", clips_dir, "Directory of audio clips")
      ->required()
      ->check(CLI::ExistingDirectory);
  serve->add_option("--annotators", annotators, "Roster (default: from trials)")
      ->delimiter(',');
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");
  serve->add_option("--ui-dir", ui_dir, "Static UI bundle served at /")
      ->check(CLI::ExistingDirectory);

  auto* kappa = app.add_subcommand("kappa", "Fleiss' kappa over round-two trials");
  kappa->add_option("--trials", trials_path, "Trials JSONL")->required()->check(existing);
  kappa->add_option("--labels", labels_path, "Labels JSONL")->required()->check(existing);
  kappa->add_option("--categories", categories, "Label categories (default: all five)")
      ->delimiter(',');
  kappa->add_option("--out", out, "Result JSON (default stdout)");

  auto* fit = app.add_subcommand("fit", "Logistic calibration and crossover threshold");
  fit->add_option("--labels", labels_path, "Labels JSONL")->required()->check(existing);
  auto* fit_pairs =
      fit->add_option("--pairs", pairs_path, "Scored-pair TSV")->check(existing);
  auto* fit_scored = fit->add_option("--scored-trials", scored_path,
                                     "Scored trial table JSONL")
                         ->check(existing);
  fit_pairs->excludes(fit_scored);
  fit->add_option("--trials", trials_path,
                  "Trials JSONL; labels on round-two trials are skipped")
      ->check(existing);
  fit->add_option("--ridge", ridge, "L2 penalty on the slope");
  fit->add_option("--out", out, "Fit report JSON (default stdout)");

  auto* clean = app.add_subcommand("clean", "Apply a threshold and export cleaned manifests");
  add_manifest_opts(clean);
  clean->add_option("--pairs", pairs_path, "Scored-pair TSV")->required()->check(existing);
  clean->add_option("--tau", tau, "Similarity threshold");
  clean->add_option("--provenance", provenance,
                    "audited_crossover | eer_derived | user_set")
      ->check(CLI::IsMember({"audited_crossover", "eer_derived", "user_set"}));
  clean->add_option("--flag-threshold", flag_threshold, "Per-client loss flag");
  clean->add_option("--mode", mode, "annotate | drop")
      ->check(CLI::IsMember({"annotate", "drop"}));
  clean->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  simulate->add_option("--speakers", synth.n_speakers, "Speakers");
  simulate->add_option("--utts", synth.utts_per_speaker, "Utterances per speaker");
  simulate->add_option("--dim", synth.dim, "Embedding dimension");
  simulate->add_option("--sigma", synth.noise_sigma, "Within-speaker noise");
  simulate->add_option("--rate", synth.contamination_rate, "Share of contaminated clients")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--fraction", synth.contamination_fraction,
                       "Intruder share of a contaminated client")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--language", synth.language, "Language code");
  simulate->add_flag("--contaminate-enrollment", synth.contaminate_enrollment,
                     "Allow intruders in the enrollment position");
  simulate->add_option("--seed", synth.seed, "Generation seed")->required();
  simulate->add_option("--out-dir", out_dir, "Output directory")->required();

  auto* eer = app.add_subcommand("eer", "FAR/FRR sweep and EER against ground truth");
  auto* eer_scores = eer->add_option("--scores", scores_path,
                                     "TSV of score<TAB>label (1/0, target/nontarget)")
                         ->check(existing);
  auto* eer_pairs = eer->add_option("--pairs", pairs_path, "Scored-pair TSV")->check(existing);
  eer->add_option("--truth", truth_path, "Truth JSONL (with --pairs)")->check(existing);
  eer_scores->excludes(eer_pairs);
  eer->add_option("--out", out, "Operating points TSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::optional<log::ScopedCapture> silence;
  if (quiet) silence.emplace();

  try {
    if (*ingest) {
      const auto ms = detail::load_manifests(manifests, language, whitespaceless);
      std::string tsv = "language\tpath\tclient_id\ttoken_count\teligibility\n";
      for (const auto& m : ms) {
        const auto tags = mark_eligibility(m);
        std::map<Eligibility, std::size_t> counts;
        for (std::size_t i = 0; i < m.records.size(); ++i) {
          const auto& r = m.records[i];
          ++counts[tags[i]];
          tsv += m.language + '\t' + r.utterance_id + '\t' + r.client_id + '\t' +
                 std::to_string(r.token_count) + '\t' +
                 std::string(to_string(tags[i])) + '\n';
        }
        log::info(m.language + ": " + std::to_string(counts[Eligibility::kEligible]) +
                  " eligible, " + std::to_string(counts[Eligibility::kTooShort]) +
                  " too_short, " +
                  std::to_string(counts[Eligibility::kSingletonClient]) +
                  " singleton_client");
      }
      if (out.empty()) {
        std::cout << tsv;
      } else {
        text::write_file(out, tsv);
      }
    } else if (*score) {
      const auto ms = detail::load_manifests(manifests, language, whitespaceless);
      const auto table = detail::load_tables(embeddings);
      const auto pairs = score_manifests(ms, table_provider(table), threads);
      std::map<PairStatus, std::size_t> counts;
      for (const auto& p : pairs) ++counts[p.status];
      for (const auto& [st, n] : counts) {
        log::info(std::string(to_string(st)) + ": " + std::to_string(n));
      }
      log::info("enrollment utterances are exempt from the minimum-token rule");
      text::write_file(out, format_pairs(pairs));
    } else if (*report) {
      const auto pairs = load_pairs(pairs_path);
      nlohmann::json j = nlohmann::json::array();
      for (const auto& s : summarize_by_language(pairs)) j.push_back(detail::to_json(s));
      if (j.empty()) throw EmptyInputError("no scored pairs");
      detail::write_json(out, {{"summaries", j}});
    } else if (*sample) {
      if (round == 1) {
        if (pairs_path.empty()) throw CLI::RequiredError("--pairs");
        const auto pairs = load_pairs(pairs_path);
        auto s = sample_round1(pairs, per_bin, seed);
        const auto owner = assign_annotators(s.trials, annotators);
        std::map<std::string, std::size_t> per_annotator;
        for (const auto& [_, a] : owner) ++per_annotator[a];
        for (const auto& [a, n] : per_annotator) {
          log::info(a + ": " + std::to_string(n) + " language(s)");
        }
        std::sort(s.trials.begin(), s.trials.end(),
                  [](const AuditTrial& x, const AuditTrial& y) {
                    return x.trial_id < y.trial_id;
                  });
        text::write_file(out, format_jsonl<AuditTrial>(s.trials));
        if (!scored_path.empty()) {
          text::write_file(scored_path, format_jsonl<ScoredTrial>(s.scored));
        }
        log::info("wrote " + std::to_string(s.trials.size()) + " round-one trials");
      } else {
        if (trials_path.empty()) throw CLI::RequiredError("--trials");
        if (labels_path.empty()) throw CLI::RequiredError("--labels");
        auto trials = load_trials(trials_path);
        const auto labels = load_labels(labels_path);
        const auto r2 = sample_round2(trials, labels, annotators, n_per_annotator, seed);
        trials.insert(trials.end(), r2.begin(), r2.end());
        text::write_file(out, format_jsonl<AuditTrial>(trials));
        log::info("wrote " + std::to_string(r2.size()) + " round-two trials");
      }
    } else if (*serve) {
      ServiceConfig cfg;
      cfg.trials_path = trials_path;
      cfg.labels_path = labels_path;
      cfg.clips_dir = clips_dir;
      cfg.roster = annotators;
      cfg.ui_dir = ui_dir;
      if (const char* tok = std::getenv(std::string(kAdminTokenEnv).c_str())) {
        cfg.admin_token = tok;
      }
      AuditService service(std::move(cfg));
      httplib::Server srv;
      service.register_routes(srv);
      log::info("serving " + std::to_string(service.roster().size()) +
                " annotator(s) on " + host + ":" + std::to_string(port));
      if (!srv.listen(host, port)) {
        throw Error("cannot listen on " + host + ":" + std::to_string(port));
      }
    } else if (*kappa) {
      const auto trials = load_trials(trials_path);
      const auto labels = load_labels(labels_path);
      const auto cats = detail::parse_categories(categories);
      const auto ratings = round_two_ratings(trials, labels, cats);
      const auto res = fleiss_kappa(ratings, cats.size());
      auto j = detail::to_json(res);
      for (Label c : cats) j["categories"].push_back(to_string(c));
      detail::write_json(out, j);
    } else if (*fit) {
      const auto labels = load_labels(labels_path);
      std::vector<ScoredTrial> scored;
      if (!scored_path.empty()) {
        scored = load_scored_trials(scored_path);
      } else if (!pairs_path.empty()) {
        scored = scored_trials_from_pairs(load_pairs(pairs_path));
      } else {
        throw CLI::RequiredError("--pairs or --scored-trials");
      }
      std::set<std::string> round_two;
      if (!trials_path.empty()) {
        for (const auto& t : load_trials(trials_path)) {
          if (t.round == AuditRound::kTwo) round_two.insert(t.trial_id);
        }
      }
      const auto bt = build_binary_trials(labels, scored, round_two);
      LogisticOptions opt;
      opt.ridge = ridge;
      const auto f = fit_logistic(bt.trials, opt);
      nlohmann::json j;
      j["fit"] = to_json(f);
      j["n_binary_trials"] = bt.trials.size();
      for (std::size_t i = 0; i < kNumLabels; ++i) {
        j["dropped"][std::string(to_string(kAllLabels[i]))] = bt.dropped[i];
      }
      j["skipped_round_two"] = bt.skipped_round_two;
      if (f.converged) {
        try {
          j["crossover"] = to_json(crossover(f));
        } catch (const UndefinedCrossoverError& e) {
          j["crossover_error"] = e.what();
        }
      }
      for (const auto& s : fit_subgroups(bt.trials, SubgroupBy::kAnnotator, opt)) {
        j["subgroups"]["annotator"].push_back(to_json(s));
      }
      for (const auto& s : fit_subgroups(bt.trials, SubgroupBy::kLanguage, opt)) {
        j["subgroups"]["language"].push_back(to_json(s));
      }
      detail::write_json(out, j);
      if (!f.converged) return kExitData;
    } else if (*clean) {
      const auto ms = detail::load_manifests(manifests, language, whitespaceless);
      const auto pairs = load_pairs(pairs_path);
      ThresholdPolicy policy{tau, ThresholdProvenance::kUserSet};
      if (provenance == "audited_crossover") {
        policy.provenance = ThresholdProvenance::kAuditedCrossover;
      } else if (provenance == "eer_derived") {
        policy.provenance = ThresholdProvenance::kEerDerived;
      }
      const auto decisions = apply_threshold(pairs, policy);
      const auto rep = data_loss_report(decisions, ms, flag_threshold);
      detail::ensure_dir(out_dir);
      const auto export_mode =
          mode == "drop" ? ExportMode::kDropExcluded : ExportMode::kAnnotateOnly;
      for (const auto& m : ms) {
        text::write_file((detail::fs::path(out_dir) / (m.language + ".cleaned.tsv")).string(),
                         export_cleaned_manifest(m, decisions, export_mode));
      }
      auto j = to_json(rep);
      j["tau"] = policy.tau;
      j["provenance"] = to_string(policy.provenance);
      text::write_file((detail::fs::path(out_dir) / "report.json").string(),
                       j.dump(2) + "\n");
      const auto txt = format_report_text(rep);
      text::write_file((detail::fs::path(out_dir) / "report.txt").string(), txt);
      if (!quiet) std::cerr << txt;
    } else if (*simulate) {
      const auto c = generate_contaminated(synth);
      detail::ensure_dir(out_dir);
      const detail::fs::path dir(out_dir);
      text::write_file((dir / "validated.tsv").string(), format_manifest(c.manifest));
      text::write_file((dir / "embeddings.tsv").string(), format_embedding_table(c.table));
      text::write_file((dir / "truth.jsonl").string(), format_truth(c.truth));
      log::info("wrote " + std::to_string(c.manifest.records.size()) +
                " utterances to " + out_dir);
    } else if (*eer) {
      std::vector<LabeledScore> trials;
      if (!scores_path.empty()) {
        const std::string data = text::read_file(scores_path);
        for (const auto& line : text::split_lines(data)) {
          if (line.content.empty()) continue;
          const auto f = text::split(line.content, '\t');
          const auto s = f.size() == 2 ? text::parse_number<double>(f[0]) : std::nullopt;
          if (!s) throw RowError(line.number, "expected score<TAB>label");
          if (f[1] == "1" || f[1] == "target") {
            trials.push_back({*s, true});
          } else if (f[1] == "0" || f[1] == "nontarget") {
            trials.push_back({*s, false});
          } else {
            throw RowError(line.number, "label must be 1/0/target/nontarget");
          }
        }
      } else if (!pairs_path.empty() && !truth_path.empty()) {
        const auto truth = parse_truth(text::read_file(truth_path));
        const auto speaker = [&](const std::string& u) {
          const auto it = truth.speaker_of.find(u);
          if (it == truth.speaker_of.end()) {
            throw ConsistencyError("truth has no entry for '" + u + "'");
          }
          return it->second;
        };
        for (const auto& p : load_pairs(pairs_path)) {
          if (p.status != PairStatus::kScored) continue;
          trials.push_back({*p.score, speaker(p.test_id) == speaker(p.enrollment_id)});
        }
      } else {
        throw CLI::RequiredError("--scores, or --pairs with --truth");
      }
      const auto er = compute_eer(trials);
      if (!out.empty()) text::write_file(out, format_operating_points(er));
      std::cout << nlohmann::json{{"eer", er.eer},
                                  {"eer_threshold", er.eer_threshold},
                                  {"inverted", er.inverted},
                                  {"n", trials.size()}}
                       .dump()
                << '\n';
    }
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace cvclean::cli
