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

// HTTP service that serves blinded audit trials and clips to annotators and
// collects their labels.
//
// Every annotator-facing response is built from AuditTrial, which has no
// score, bin or client fields; the scored-trial table is never loaded here.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "cvclean/audit.hpp"
#include "cvclean/error.hpp"
#include "cvclean/label_store.hpp"

namespace cvclean {

struct ServiceConfig {
  std::string trials_path;
  std::string labels_path;
  std::string clips_dir;
  std::vector<std::string> roster;  // derived from trial assignees if empty
  std::string admin_token;          // /api/export disabled when empty
  std::string ui_dir;               // static bundle mounted at / if set
};

inline constexpr std::string_view kAdminTokenHeader = "X-Admin-Token";
inline constexpr std::string_view kAdminTokenEnv = "CVCLEAN_ADMIN_TOKEN";

inline std::string audio_content_type(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".mp3") return "audio/mpeg";
  if (ext == ".wav") return "audio/wav";
  if (ext == ".ogg" || ext == ".oga") return "audio/ogg";
  if (ext == ".opus") return "audio/opus";
  if (ext == ".flac") return "audio/flac";
  if (ext == ".webm") return "audio/webm";
  if (ext == ".m4a" || ext == ".mp4") return "audio/mp4";
  return "application/octet-stream";
}

/// Percent-encodes everything outside the URL unreserved set.
inline std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 15]);
    }
  }
  return out;
}

/// A bare file name that cannot escape the clips directory.
inline bool is_safe_clip_name(std::string_view id) {
  return !id.empty() && id.front() != '.' &&
         id.find_first_of(std::string_view("/\\\0", 3)) == std::string_view::npos &&
         id.find("..") == std::string_view::npos;
}

class AuditService {
 public:
  explicit AuditService(ServiceConfig cfg)
      : cfg_(std::move(cfg)),
        trials_(load_trials(cfg_.trials_path)),
        store_(cfg_.labels_path) {
    std::set<std::string> roster(cfg_.roster.begin(), cfg_.roster.end());
    for (std::size_t i = 0; i < trials_.size(); ++i) {
      const auto& t = trials_[i];
      if (!by_id_.emplace(t.trial_id, i).second) {
        throw DuplicationError("duplicate trial id '" + t.trial_id + "'");
      }
      if (t.assignees.empty()) {
        throw ConsistencyError("trial '" + t.trial_id + "' has no assignees");
      }
      for (const auto& a : t.assignees) {
        if (cfg_.roster.empty()) roster.insert(a);
        queues_[a].push_back(i);
      }
    }
    roster_.assign(roster.begin(), roster.end());
    for (auto& [_, q] : queues_) {
      std::sort(q.begin(), q.end(), [this](std::size_t a, std::size_t b) {
        const auto& x = trials_[a];
        const auto& y = trials_[b];
        return std::tie(x.round, x.trial_id) < std::tie(y.round, y.trial_id);
      });
    }
  }

  const std::vector<std::string>& roster() const { return roster_; }
  const LabelStore& labels() const { return store_; }

  /// Progress counts for one annotator: (labeled, assigned).
  std::pair<std::size_t, std::size_t> progress(const std::string& annotator) const {
    const auto it = queues_.find(annotator);
    if (it == queues_.end()) return {0, 0};
    std::size_t done = 0;
    for (std::size_t i : it->second) {
      done += store_.contains(trials_[i].trial_id, annotator);
    }
    return {done, it->second.size()};
  }

  /// Next-trial payload; a completion object once the queue is exhausted.
  nlohmann::json next_payload(const std::string& annotator) const {
    const auto [done, total] = progress(annotator);
    nlohmann::json progress = {{"done", done}, {"total", total}};
    const auto it = queues_.find(annotator);
    if (it != queues_.end()) {
      for (std::size_t i : it->second) {
        const AuditTrial& t = trials_[i];
        if (store_.contains(t.trial_id, annotator)) continue;
        return {{"done", false},
                {"trial_id", t.trial_id},
                {"round", static_cast<int>(t.round)},
                {"enrollment_audio_url", "/audio/" + url_encode(t.enrollment_id)},
                {"test_audio_url", "/audio/" + url_encode(t.test_id)},
                {"progress", progress}};
      }
    }
    return {{"done", true}, {"progress", progress}};
  }

  void register_routes(httplib::Server& srv) {
    srv.Get("/api/annotators", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"annotators", roster_}});
    });

    srv.Get(R"(/api/session/([^/]+)/next)",
            [this](const httplib::Request& req, httplib::Response& res) {
              const std::string annotator = req.matches[1];
              if (!is_annotator(annotator)) {
                reply(res, 404, {{"error", "unknown annotator"}});
                return;
              }
              reply(res, 200, next_payload(annotator));
            });

    srv.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
      handle_label(req, res);
    });

    srv.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& a : roster_) {
        const auto [done, total] = progress(a);
        rows.push_back({{"annotator", a}, {"done", done}, {"total", total}});
      }
      reply(res, 200, {{"annotators", rows}});
    });

    srv.Get("/api/export", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string token = req.get_header_value(std::string(kAdminTokenHeader));
      if (cfg_.admin_token.empty() || token != cfg_.admin_token) {
        reply(res, 403, {{"error", "admin token required"}});
        return;
      }
      const auto labels = store_.snapshot();
      res.status = 200;
      res.set_content(format_jsonl<AuditLabel>(labels), "application/x-ndjson");
    });

    srv.Get(R"(/audio/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      serve_audio(req.matches[1], res);
    });

    if (!cfg_.ui_dir.empty()) srv.set_mount_point("/", cfg_.ui_dir);
  }

 private:
  static void reply(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  bool is_annotator(const std::string& a) const {
    return std::find(roster_.begin(), roster_.end(), a) != roster_.end();
  }

  static std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

  void handle_label(const httplib::Request& req, httplib::Response& res) {
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      reply(res, 400, {{"error", "body is not JSON"}});
      return;
    }
    if (!body.is_object() || !body.contains("trial_id") || !body.contains("annotator") ||
        !body.contains("label") || !body["trial_id"].is_string() ||
        !body["annotator"].is_string() || !body["label"].is_string()) {
      reply(res, 400, {{"error", "expected {trial_id, annotator, label}"}});
      return;
    }
    AuditLabel label;
    label.trial_id = body["trial_id"].get<std::string>();
    label.annotator = body["annotator"].get<std::string>();
    const auto parsed = parse_label(body["label"].get<std::string>());
    if (!parsed) {
      reply(res, 422, {{"error", "unknown label"}});
      return;
    }
    label.label = *parsed;
    const auto it = by_id_.find(label.trial_id);
    if (it == by_id_.end()) {
      reply(res, 403, {{"error", "trial not assigned to annotator"}});
      return;
    }
    const auto& as = trials_[it->second].assignees;
    if (std::find(as.begin(), as.end(), label.annotator) == as.end()) {
      reply(res, 403, {{"error", "trial not assigned to annotator"}});
      return;
    }
    label.timestamp = utc_now();
    try {
      if (store_.submit(label) == SubmitResult::kDuplicate) {
        reply(res, 409, {{"error", "label already recorded"}});
        return;
      }
    } catch (const Error& e) {
      reply(res, 500, {{"error", e.what()}});
      return;
    }
    reply(res, 201, {{"status", "accepted"}, {"trial_id", label.trial_id}});
  }

  void serve_audio(const std::string& id, httplib::Response& res) const {
    namespace fs = std::filesystem;
    if (!is_safe_clip_name(id)) {
      reply(res, 400, {{"error", "invalid clip name"}});
      return;
    }
    std::error_code ec;
    const fs::path root = fs::weakly_canonical(cfg_.clips_dir, ec);
    const fs::path file = fs::weakly_canonical(root / id, ec);
    if (ec || file.parent_path() != root || !fs::is_regular_file(file)) {
      reply(res, 404, {{"error", "clip not found"}});
      return;
    }
    try {
      res.status = 200;
      res.set_content(text::read_file(file.string()), audio_content_type(file));
    } catch (const Error&) {
      reply(res, 404, {{"error", "clip not readable"}});
    }
  }

  ServiceConfig cfg_;
  std::vector<AuditTrial> trials_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::vector<std::size_t>> queues_;
  std::vector<std::string> roster_;
  LabelStore store_;
};

}  // namespace cvclean
