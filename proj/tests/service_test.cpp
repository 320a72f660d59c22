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

#include "cvclean/service.hpp"

#include <gtest/gtest.h>

#include <set>

#include "service_fixture.hpp"

namespace cvclean {
namespace {

using testing::drain_queue;
using testing::leaks_score;
using testing::post_label;
using testing::RunningService;
using testing::service_config;
using testing::TempDir;
using testing::write_service_fixture;

class ServiceTest : public ::testing::Test {
 protected:
  TempDir dir{"service"};
  std::vector<AuditTrial> trials = write_service_fixture(dir);
};

TEST_F(ServiceTest, Roster) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  auto res = c.Get("/api/annotators");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["annotators"],
            nlohmann::json::array({"alice", "bob"}));
  EXPECT_FALSE(leaks_score(nlohmann::json::parse(res->body)));
}

TEST_F(ServiceTest, NextPayloadIsBlinded) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  for (const std::string who : {"alice", "bob"}) {
    for (int k = 0; k < 20; ++k) {
      auto res = c.Get("/api/session/" + who + "/next");
      ASSERT_TRUE(res);
      ASSERT_EQ(res->status, 200);
      const auto j = nlohmann::json::parse(res->body);
      EXPECT_FALSE(leaks_score(j)) << res->body;
      if (j["done"]) {
        EXPECT_EQ(j["progress"]["done"], j["progress"]["total"]);
        break;
      }
      EXPECT_TRUE(j.contains("enrollment_audio_url"));
      EXPECT_TRUE(j.contains("test_audio_url"));
      EXPECT_TRUE(j.contains("round"));
      int status = 0;
      const auto ack = post_label(c, j["trial_id"], who, "not_sure", &status);
      EXPECT_EQ(status, 201);
      EXPECT_FALSE(leaks_score(ack));
    }
  }
  auto progress = c.Get("/api/progress");
  ASSERT_TRUE(progress);
  EXPECT_FALSE(leaks_score(nlohmann::json::parse(progress->body)));
}

TEST_F(ServiceTest, QueueOrderRoundOneFirstThenTrialId) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  const auto order = drain_queue(c, "alice");
  std::vector<std::pair<int, std::string>> expected;
  for (const auto& t : trials) {
    if (t.assignees[0] == "alice") expected.push_back({static_cast<int>(t.round), t.trial_id});
  }
  std::sort(expected.begin(), expected.end());
  ASSERT_EQ(order.size(), expected.size());
  for (std::size_t i = 0; i < order.size(); ++i) EXPECT_EQ(order[i], expected[i].second);
}

TEST_F(ServiceTest, LabelStatusCodes) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  const std::string alice_trial = trials[1].trial_id;
  int status = 0;
  post_label(c, alice_trial, "alice", "same_speaker", &status);
  EXPECT_EQ(status, 201);
  post_label(c, alice_trial, "alice", "different_speaker", &status);
  EXPECT_EQ(status, 409);
  post_label(c, trials[3].trial_id, "alice", "definitely", &status);
  EXPECT_EQ(status, 422);
  post_label(c, trials[0].trial_id, "alice", "same_speaker", &status);
  EXPECT_EQ(status, 403);
  post_label(c, "t0000000000000000", "alice", "same_speaker", &status);
  EXPECT_EQ(status, 403);
  auto bad = c.Post("/api/labels", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto missing = c.Post("/api/labels", R"({"trial_id":"x"})", "application/json");
  EXPECT_EQ(missing->status, 400);
  auto unknown = c.Get("/api/session/mallory/next");
  EXPECT_EQ(unknown->status, 404);
}

TEST_F(ServiceTest, RestartResumesIdenticalSequence) {
  std::vector<std::string> uninterrupted;
  {
    TempDir other("service_ref");
    write_service_fixture(other);
    RunningService svc(service_config(other));
    auto c = svc.client();
    uninterrupted = drain_queue(c, "bob");
  }
  std::vector<std::string> resumed;
  {
    RunningService svc(service_config(dir));
    auto c = svc.client();
    resumed = drain_queue(c, "bob", 3);
  }
  {
    RunningService svc(service_config(dir));
    auto c = svc.client();
    int status = 0;
    post_label(c, resumed[0], "bob", "same_speaker", &status);
    EXPECT_EQ(status, 409);
    const auto rest = drain_queue(c, "bob");
    resumed.insert(resumed.end(), rest.begin(), rest.end());
  }
  EXPECT_EQ(resumed, uninterrupted);
  EXPECT_EQ(load_labels(dir.file("labels.jsonl")).size(), uninterrupted.size());
}

TEST_F(ServiceTest, AudioServingAndTraversal) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  auto res = c.Get("/audio/" + trials[0].test_id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "audio/mpeg");
  EXPECT_EQ(res->body, "ID3 " + trials[0].test_id);
  EXPECT_EQ(c.Get("/audio/nope.mp3")->status, 404);
  for (const char* attack : {"/audio/..%2Fsecret.txt", "/audio/..", "/audio/.hidden",
                             "/audio/%2E%2E%2Fsecret.txt"}) {
    auto r = c.Get(attack);
    ASSERT_TRUE(r) << attack;
    EXPECT_NE(r->status, 200) << attack;
    EXPECT_EQ(r->body.find("do not serve"), std::string::npos);
  }
}

TEST_F(ServiceTest, ExportRequiresToken) {
  RunningService svc(service_config(dir));
  auto c = svc.client();
  int status = 0;
  post_label(c, trials[1].trial_id, "alice", "same_speaker", &status);
  EXPECT_EQ(c.Get("/api/export")->status, 403);
  auto wrong = c.Get("/api/export", {{"X-Admin-Token", "guess"}});
  EXPECT_EQ(wrong->status, 403);
  auto ok = c.Get("/api/export", {{"X-Admin-Token", "s3cret"}});
  ASSERT_EQ(ok->status, 200);
  const auto labels = parse_jsonl(ok->body, label_from_json);
  ASSERT_EQ(labels.size(), 1u);
  EXPECT_EQ(labels[0].trial_id, trials[1].trial_id);
  EXPECT_FALSE(labels[0].timestamp.empty());
}

TEST_F(ServiceTest, RejectsTrialsWithoutAssignees) {
  auto bad = trials;
  bad[0].assignees.clear();
  text::write_file(dir.file("trials.jsonl"), format_jsonl<AuditTrial>(bad));
  EXPECT_THROW(AuditService{service_config(dir)}, ConsistencyError);
}

TEST(ServiceHelpers, SafeNamesAndContentTypes) {
  EXPECT_TRUE(is_safe_clip_name("common_voice_en_1.mp3"));
  EXPECT_FALSE(is_safe_clip_name("../x"));
  EXPECT_FALSE(is_safe_clip_name("a/b"));
  EXPECT_FALSE(is_safe_clip_name(""));
  EXPECT_FALSE(is_safe_clip_name(".x"));
  EXPECT_FALSE(is_safe_clip_name(std::string_view("a\0b", 3)));
  EXPECT_TRUE(is_safe_clip_name("clip_000100.wav"));
  EXPECT_EQ(audio_content_type("a.WAV"), "audio/wav");
  EXPECT_EQ(audio_content_type("a.bin"), "application/octet-stream");
  EXPECT_EQ(url_encode("a b/c.mp3"), "a%20b%2Fc.mp3");
}

}  // namespace
}  // namespace cvclean
