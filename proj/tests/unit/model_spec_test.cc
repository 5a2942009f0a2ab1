// Copyright 2026 The emostim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "emostim/model_spec.hpp"

#include <gtest/gtest.h>

#include "emostim/error.hpp"
#include "emostim/hashing.hpp"
#include "test_util.hpp"

namespace emostim {
namespace {

using testing::MakeSample;
using testing::TempDir;
using testing::WriteJson;

TEST(HashingTest, Sha256KnownVectors) {
  EXPECT_EQ(Sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(HashingTest, CanonicalJsonSortsKeysAndDropsWhitespace) {
  Json a = Json::parse(R"({"b": 1, "a": {"y": [1, 2], "x": "s"}})");
  EXPECT_EQ(CanonicalJson(a), R"({"a":{"x":"s","y":[1,2]},"b":1})");
  Json b = Json::parse(R"({"a":{"x":"s","y":[1,2]},"b":1})");
  EXPECT_EQ(CanonicalJson(a), CanonicalJson(b));
  EXPECT_EQ(CanonicalJson(Json("café")), "\"café\"");
}

TEST(HashingTest, InvalidUtf8IsRejected) {
  EXPECT_THROW(CanonicalJson(Json(std::string("\xff\xfe"))), ValidationError);
}

ModelSpec HttpModel() { return ParseModelSpec("gpt-test@http://localhost:1"); }

TEST(RequestHashTest, IdenticalRequestsShareAHash) {
  EXPECT_EQ(RequestHash(HttpModel(), "prompt"), RequestHash(HttpModel(), "prompt"));
  EXPECT_EQ(RequestHash(HttpModel(), "prompt").size(), 64u);
}

TEST(RequestHashTest, EveryRequestFieldChangesTheHash) {
  const ModelSpec base = HttpModel();
  const std::string h = RequestHash(base, "prompt");
  EXPECT_NE(h, RequestHash(base, "prompt "));

  ModelSpec m = base;
  m.name = "other";
  EXPECT_NE(h, RequestHash(m, "prompt"));

  m = base;
  m.params.temperature = 0.0;
  EXPECT_NE(h, RequestHash(m, "prompt"));

  m = base;
  m.params.max_tokens = 10;
  EXPECT_NE(h, RequestHash(m, "prompt"));

  m = base;
  m.params.seed = 3;
  EXPECT_NE(h, RequestHash(m, "prompt"));

  m = base;
  m.params.extra["top_p"] = 0.9;
  EXPECT_NE(h, RequestHash(m, "prompt"));
}

TEST(RequestHashTest, BaseUrlIsNotPartOfTheHash) {
  ModelSpec a = ParseModelSpec("m@http://a");
  ModelSpec b = ParseModelSpec("m@http://b");
  EXPECT_EQ(RequestHash(a, "p"), RequestHash(b, "p"));
}

TEST(RequestHashTest, MockSampleContextSeparatesSharedPrompts) {
  ModelSpec oracle = ParseModelSpec("mock:oracle");
  Sample a = MakeSample("0", "x", {"one"});
  Sample b = MakeSample("1", "x", {"two"});
  EXPECT_NE(RequestHash(oracle, "p", &a), RequestHash(oracle, "p", &b));
  // HTTP requests ignore the sample: the endpoint only sees the prompt.
  EXPECT_EQ(RequestHash(HttpModel(), "p", &a), RequestHash(HttpModel(), "p", &b));
}

TEST(ModelSpecTest, ParsesCompactForms) {
  EXPECT_EQ(ParseModelSpec("mock:oracle").backend, Backend::kMockOracle);
  ModelSpec fixed = ParseModelSpec("mock:fixed:hello there");
  EXPECT_EQ(fixed.backend, Backend::kMockFixed);
  EXPECT_EQ(fixed.fixed_text, "hello there");
  ModelSpec uc = ParseModelSpec("mock:uniform_choice:17");
  EXPECT_EQ(uc.backend, Backend::kMockUniformChoice);
  EXPECT_EQ(uc.params.seed, 17);
  EXPECT_FALSE(ParseModelSpec("mock:uniform_choice").params.seed.has_value());
  ModelSpec http = ParseModelSpec("gpt-4o@https://api.example.com");
  EXPECT_EQ(http.backend, Backend::kHttpChat);
  EXPECT_EQ(http.name, "gpt-4o");
  EXPECT_EQ(http.base_url, "https://api.example.com");
  EXPECT_EQ(ParseModelSpec("gpt-4o", std::string("http://d")).base_url, "http://d");
  EXPECT_THROW(ParseModelSpec("mock:telepathy"), ValidationError);
  EXPECT_THROW(ParseModelSpec("mock:uniform_choice:abc"), ValidationError);
}

TEST(ModelSpecTest, ValidationKinds) {
  try {
    ValidateModelSpec(ParseModelSpec("gpt-4o"));
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
  ModelSpec m = HttpModel();
  m.params.temperature = -0.1;
  EXPECT_THROW(ValidateModelSpec(m), ValidationError);
  EXPECT_THROW(ValidateModelSpec(ParseModelSpec("mock:uniform_choice")), ValidationError);
  EXPECT_NO_THROW(ValidateModelSpec(ParseModelSpec("mock:uniform_choice:1")));
}

TEST(ModelSpecTest, JsonRoundTrip) {
  ModelSpec m = HttpModel();
  m.params.temperature = 0.0;
  m.params.seed = 5;
  m.params.extra["top_p"] = 0.5;
  EXPECT_EQ(ModelSpecFromJson(ModelSpecToJson(m), "rt"), m);

  ModelSpec s;
  s.name = "scripted";
  s.backend = Backend::kMockScripted;
  s.script = ParseScript(Json::parse(R"([{"sample": "3", "response": "x"}, {"gold": true}])"), "s");
  EXPECT_EQ(ModelSpecFromJson(ModelSpecToJson(s), "rt"), s);
}

TEST(ModelSpecTest, ScriptRulesNeedExactlyOneAnswer) {
  EXPECT_THROW(ParseScript(Json::parse(R"([{"sample": "1"}])"), "s"), ValidationError);
  EXPECT_THROW(ParseScript(Json::parse(R"([{"response": "a", "gold": true}])"), "s"),
               ValidationError);
  TempDir dir;
  WriteJson(dir / "script.json", Json::parse(R"({"rules": [{"prompt_contains": "sure", "response": "yes"}]})"));
  auto rules = LoadScript(dir / "script.json");
  ASSERT_EQ(rules.size(), 1u);
  EXPECT_EQ(rules[0].prompt_contains, "sure");
  ModelSpec spec = ParseModelSpec("mock:scripted:" + (dir / "script.json").string());
  EXPECT_EQ(spec.script, rules);
}

TEST(CompletionRecordTest, JsonRoundTripDropsFromCache) {
  CompletionRecord r{"abc", "m", "p", "out", 12.5, {3, 4}, "2026-01-01T00:00:00Z", true};
  CompletionRecord back = CompletionRecordFromJson(CompletionRecordToJson(r), "rt");
  EXPECT_FALSE(back.from_cache);
  back.from_cache = true;
  EXPECT_EQ(back, r);
}

}  // namespace
}  // namespace emostim
