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

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cvclean/audit.hpp"
#include "cvclean/error.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

enum class SubmitResult { kAccepted, kDuplicate };

/// Append-only label store backed by a JSON-lines file. A (trial,
/// annotator) pair can be labeled once; the duplicate check and the durable
/// append happen under one lock, and submit() returns only after fsync.
class LabelStore {
 public:
  /// In-memory store (tests).
  LabelStore() = default;

  /// Opens or creates the file at path and replays existing labels.
  explicit LabelStore(std::string path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
      for (auto& l : load_labels(path_)) {
        if (!keys_.emplace(l.trial_id, l.annotator).second) {
          throw DuplicationError("label file has two labels for trial '" +
                                 l.trial_id + "' by '" + l.annotator + "'");
        }
        labels_.push_back(std::move(l));
      }
    }
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) {
      throw FormatError("cannot open label file " + path_ + ": " +
                        std::strerror(errno));
    }
  }

  ~LabelStore() {
    if (fd_ >= 0) ::close(fd_);
  }
  LabelStore(const LabelStore&) = delete;
  LabelStore& operator=(const LabelStore&) = delete;

  SubmitResult submit(const AuditLabel& label) {
    std::lock_guard<std::mutex> lock(mu_);
    if (keys_.count({label.trial_id, label.annotator})) {
      return SubmitResult::kDuplicate;
    }
    if (fd_ >= 0) {
      const std::string line = to_json(label).dump() + "\n";
      std::size_t written = 0;
      while (written < line.size()) {
        const ssize_t n =
            ::write(fd_, line.data() + written, line.size() - written);
        if (n < 0) {
          if (errno == EINTR) continue;
          throw FormatError("label append failed: " +
                            std::string(std::strerror(errno)));
        }
        written += static_cast<std::size_t>(n);
      }
      if (::fsync(fd_) != 0) {
        throw FormatError("label fsync failed: " +
                          std::string(std::strerror(errno)));
      }
    }
    keys_.emplace(label.trial_id, label.annotator);
    labels_.push_back(label);
    return SubmitResult::kAccepted;
  }

  bool contains(const std::string& trial_id, const std::string& annotator) const {
    std::lock_guard<std::mutex> lock(mu_);
    return keys_.count({trial_id, annotator}) > 0;
  }

  std::vector<AuditLabel> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return labels_;
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return labels_.size();
  }

 private:
  std::string path_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::set<std::pair<std::string, std::string>> keys_;
  std::vector<AuditLabel> labels_;
};

}  // namespace cvclean
