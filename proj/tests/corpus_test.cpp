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
#include "cvclean/corpus.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>

namespace cvclean {
namespace {

const TokenizerPolicy kWs{TokenizerMode::kWhitespace, "en"};
const TokenizerPolicy kChar{TokenizerMode::kPerCharacter, "zh-CN"};

TEST(CountTokens, Whitespace) {
  EXPECT_EQ(count_tokens("the quick fox", kWs), 3u);
  EXPECT_EQ(count_tokens("  the\tquick  fox \n", kWs), 3u);
  EXPECT_EQ(count_tokens("a\xC2\xA0" "b", kWs), 2u);  // no-break space
  EXPECT_EQ(count_tokens("hello, world!", kWs), 2u);
}

TEST(CountTokens, EmptyIsZero) {
  EXPECT_EQ(count_tokens("", kWs), 0u);
  EXPECT_EQ(count_tokens("", kChar), 0u);
  EXPECT_EQ(count_tokens("   ", kWs), 0u);
}

TEST(CountTokens, PerCharacter) {
  // Four Han characters, no spaces.
  EXPECT_EQ(count_tokens("\xE4\xBD\xA0\xE5\xA5\xBD\xE4\xB8\x96\xE7\x95\x8C", kChar), 4u);
  // Ideographic full stop and comma are punctuation.
  EXPECT_EQ(count_tokens("\xE4\xBD\xA0\xE3\x80\x81\xE5\xA5\xBD\xE3\x80\x82", kChar), 2u);
  // Thai letters without spaces, plus ASCII symbol.
  EXPECT_EQ(count_tokens("\xE0\xB8\x81\xE0\xB8\x82 +", kChar), 2u);
  EXPECT_EQ(count_tokens("ab c.", kChar), 3u);
}

TEST(CountTokens, Deterministic) {
  std::mt19937 gen(7);
  for (int i = 0; i < 200; ++i) {
    std::string s;
    const int len = static_cast<int>(gen() % 40);
    for (int j = 0; j < len; ++j) s.push_back(static_cast<char>(gen() % 256));
    EXPECT_EQ(count_tokens(s, kWs), count_tokens(s, kWs));
    EXPECT_EQ(count_tokens(s, kChar), count_tokens(s, kChar));
  }
}

TEST(DefaultPolicy, WhitespacelessLanguages) {
  for (const char* lang : {"yue", "zh-CN", "th", "ja"}) {
    EXPECT_EQ(default_policy(lang).mode, TokenizerMode::kPerCharacter) << lang;
  }
  EXPECT_EQ(default_policy("en").mode, TokenizerMode::kWhitespace);
}

TEST(ParseManifest, ThreeRows) {
  const auto m = parse_manifest(
      "client_id\tpath\tsentence\tup_votes\n"
      "c1\ta.mp3\tone two three\t2\n"
      "c1\tb.mp3\tfour five\t0\r\n"
      "c2\tc.mp3\tsix\t1\n",
      "en", kWs, "v17");
  ASSERT_EQ(m.records.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(m.records[i].row_index, i);
  EXPECT_EQ(m.records[0].token_count, 3u);
  EXPECT_EQ(m.records[1].token_count, 2u);
  EXPECT_EQ(m.records[1].fields.back(), "0");
  EXPECT_EQ(m.records[2].language, "en");
  EXPECT_EQ(m.source_version, "v17");
}

TEST(ParseManifest, HeaderOnly) {
  EXPECT_TRUE(parse_manifest("client_id\tpath\tsentence\n", "en", kWs).records.empty());
}

TEST(ParseManifest, MissingColumnIsNamed) {
  try {
    parse_manifest("client_id\tpath\n", "en", kWs);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("sentence"), std::string::npos);
  }
}

TEST(ParseManifest, ShortRowCarriesLineNumber) {
  try {
    parse_manifest("client_id\tpath\tsentence\nc1\ta.mp3\tok ok ok\nc1\tb.mp3\n", "en", kWs);
    FAIL();
  } catch (const RowError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ParseManifest, DuplicateUtterance) {
  EXPECT_THROW(parse_manifest("client_id\tpath\tsentence\nc1\ta\tx\nc2\ta\ty\n", "en", kWs),
               DuplicationError);
}

TEST(ParseManifest, TokenCountOverride) {
  const auto m = parse_manifest(
      "client_id\tpath\tsentence\ttoken_count\n"
      "c1\ta\tone two three four\t2\n"
      "c1\tb\tone two\t\n",
      "en", kWs);
  EXPECT_EQ(m.records[0].token_count, 2u);
  EXPECT_EQ(m.records[1].token_count, 2u);
  EXPECT_THROW(parse_manifest("client_id\tpath\tsentence\ttoken_count\nc\ta\tx\t-1\n",
                              "en", kWs),
               RowError);
}

TEST(ParseManifest, RoundTripsThroughFormat) {
  const std::string src =
      "client_id\tpath\tsentence\textra\nc1\ta\tx y z\tq\nc2\tb\tw\t\n";
  EXPECT_EQ(format_manifest(parse_manifest(src, "en", kWs)), src);
}

LanguageManifest make(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string tsv = "client_id\tpath\tsentence\n";
  int i = 0;
  for (const auto& [client, sentence] : rows) {
    tsv += client + "\tu" + std::to_string(i++) + "\t" + sentence + "\n";
  }
  return parse_manifest(tsv, "en", kWs);
}

TEST(MarkEligibility, SingletonClient) {
  const auto tags = mark_eligibility(make({{"a", "x"}, {"b", "one two three"},
                                           {"b", "one two three"}}));
  EXPECT_EQ(tags[0], Eligibility::kSingletonClient);
  EXPECT_EQ(tags[1], Eligibility::kEligible);
}

TEST(MarkEligibility, TooShort) {
  const auto tags = mark_eligibility(make({{"c", "a b c"}, {"c", "a b"}, {"c", "a b c d"},
                                           {"c", "a b c"}, {"c", "x y z"}}));
  EXPECT_EQ(tags[1], Eligibility::kTooShort);
  for (std::size_t i : {0u, 2u, 3u, 4u}) EXPECT_EQ(tags[i], Eligibility::kEligible);
}

TEST(MarkEligibility, AllEligible) {
  for (auto t : mark_eligibility(make({{"a", "1 2 3"}, {"a", "4 5 6"}}))) {
    EXPECT_EQ(t, Eligibility::kEligible);
  }
}

TEST(MarkEligibility, SingletonCountMatchesMultisetCount) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::pair<std::string, std::string>> rows;
    const int n = 1 + static_cast<int>(gen() % 30);
    for (int i = 0; i < n; ++i) {
      rows.push_back({"c" + std::to_string(gen() % 12),
                      std::string(gen() % 2 ? "a b c" : "a")});
    }
    const auto m = make(rows);
    const auto tags = mark_eligibility(m);
    ASSERT_EQ(tags.size(), m.records.size());
    std::map<std::string, int> mult;
    for (const auto& r : rows) ++mult[r.first];
    std::size_t singletons = 0;
    for (const auto& [_, k] : mult) singletons += (k == 1);
    std::size_t tagged = 0;
    for (auto t : tags) tagged += (t == Eligibility::kSingletonClient);
    EXPECT_EQ(tagged, singletons);
  }
}

}  // namespace
}  // namespace cvclean
