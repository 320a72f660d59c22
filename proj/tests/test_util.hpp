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

#include <string>
#include <utility>
#include <vector>

#include "cvclean/corpus.hpp"

namespace cvclean::testing {

/// Manifest with rows (client, sentence); utterance ids are u0, u1, ...
inline LanguageManifest manifest_of(
    const std::vector<std::pair<std::string, std::string>>& rows,
    const std::string& language = "en") {
  std::string tsv = "client_id\tpath\tsentence\n";
  int i = 0;
  for (const auto& [client, sentence] : rows) {
    tsv += client + "\tu" + std::to_string(i++) + "\t" + sentence + "\n";
  }
  return parse_manifest(tsv, language, default_policy(language));
}

}  // namespace cvclean::testing
