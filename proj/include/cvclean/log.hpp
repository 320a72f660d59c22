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

#include <functional>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvclean::log {

enum class Level { kInfo, kWarning };

using Sink = std::function<void(Level, std::string_view)>;

namespace detail {

inline std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

inline Sink& sink() {
  static Sink s = [](Level level, std::string_view msg) {
    std::cerr << (level == Level::kWarning ? "[warn] " : "[info] ") << msg
              << '\n';
  };
  return s;
}

}  // namespace detail

/// Replaces the process-wide sink and returns the previous one.
inline Sink set_sink(Sink s) {
  std::lock_guard<std::mutex> lock(detail::sink_mutex());
  return std::exchange(detail::sink(), std::move(s));
}

inline void write(Level level, std::string_view msg) {
  std::lock_guard<std::mutex> lock(detail::sink_mutex());
  if (detail::sink()) detail::sink()(level, msg);
}

inline void info(std::string_view msg) { write(Level::kInfo, msg); }
inline void warn(std::string_view msg) { write(Level::kWarning, msg); }

/// Captures log output for the lifetime of the object (tests, CLI quiet mode).
class ScopedCapture {
 public:
  ScopedCapture()
      : previous_(set_sink([this](Level level, std::string_view msg) {
          (level == Level::kWarning ? warnings : infos).emplace_back(msg);
        })) {}
  ~ScopedCapture() { set_sink(std::move(previous_)); }
  ScopedCapture(const ScopedCapture&) = delete;
  ScopedCapture& operator=(const ScopedCapture&) = delete;

  std::vector<std::string> infos;
  std::vector<std::string> warnings;

 private:
  Sink previous_;
};

}  // namespace cvclean::log
