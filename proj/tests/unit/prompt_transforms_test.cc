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

#include "emostim/prompt_transforms.hpp"

#include <gtest/gtest.h>

#include "emostim/error.hpp"
#include "test_util.hpp"

namespace emostim {
namespace {

using testing::DataDir;

constexpr std::string_view kSentiment = "Determine whether a movie review is positive or negative.";

TEST(StimulusLibraryTest, BuiltinMatchesShippedFile) {
  StimulusLibrary shipped = StimulusLibrary::Load(DataDir() / "stimuli.json");
  const auto builtin = BuiltinStimuli();
  ASSERT_EQ(builtin.size(), 11u);
  EXPECT_EQ(shipped.stimuli(), builtin);
  for (std::size_t i = 0; i < builtin.size(); ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "EP%02zu", i + 1);
    EXPECT_EQ(builtin[i].id, id);
  }
}

TEST(StimulusLibraryTest, SpotCheckTexts) {
  const auto& lib = StimulusLibrary::Builtin();
  EXPECT_EQ(lib.At("EP02").text, "This is very important to my career.");
  EXPECT_EQ(lib.At("EP03").text, "You'd better be sure.");
  EXPECT_EQ(lib.At("EP04").text, "Are you sure?");
  EXPECT_EQ(lib.At("EP11").text,
            "Remember that progress is made one step at a time. Stay determined and keep moving "
            "forward.");
  EXPECT_EQ(lib.At("EP03").theories,
            (std::vector<Theory>{Theory::kSelfMonitoring, Theory::kCognitiveEmotionRegulation}));
  EXPECT_EQ(lib.At("EP06").theories, (std::vector<Theory>{Theory::kCompound}));
  EXPECT_EQ(lib.At("EP09").category, StimulusCategory::kSelfEsteemMotivation);
  EXPECT_EQ(lib.Find("EP12"), nullptr);
  EXPECT_THROW(lib.At("EP12"), ValidationError);
}

TEST(StimulusLibraryTest, JsonRoundTrip) {
  const auto builtin = BuiltinStimuli();
  EXPECT_EQ(StimulusLibrary::FromJson(StimuliToJson(builtin), "rt").stimuli(), builtin);
  Json bad = StimuliToJson(builtin);
  bad[0]["theory"] = "astrology";
  EXPECT_THROW(StimulusLibrary::FromJson(bad, "bad"), ValidationError);
}

TEST(ComposeTest, AppendsStimulusAfterSingleSpace) {
  RenderedPrompt p = Compose(kSentiment, Transform::Stimuli({"EP02"}));
  EXPECT_EQ(p.text,
            "Determine whether a movie review is positive or negative. This is very important to "
            "my career.");
  EXPECT_EQ(p.base_prompt, kSentiment);
  EXPECT_EQ(p.transform_id, "EP02");
}

TEST(ComposeTest, VanillaAndChainOfThought) {
  EXPECT_EQ(Compose(kSentiment, Transform::Vanilla()).text, kSentiment);
  EXPECT_EQ(Compose(kSentiment, Transform::ChainOfThought()).text,
            std::string(kSentiment) + " Let's think step by step.");
}

TEST(ComposeTest, CombinationsJoinInListOrder) {
  EXPECT_EQ(Compose("P.", Transform::Stimuli({"EP04", "EP02"})).text,
            "P. Are you sure? This is very important to my career.");
  EXPECT_EQ(Compose("P.", Transform::Stimuli({"EP02", "EP04"})).text,
            "P. This is very important to my career. Are you sure?");
}

TEST(ComposeTest, EveryBuiltinStimulusIsSuffixOfComposedPrompt) {
  for (const auto& s : BuiltinStimuli()) {
    const std::string text = Compose(kSentiment, Transform::Stimuli({s.id})).text;
    EXPECT_EQ(text, std::string(kSentiment) + " " + s.text);
  }
}

TEST(ComposeTest, AlternatePromptReplacesBase) {
  Transform t = Transform::Alternate("ape", {"EP02"}, true, "Classify the review.");
  RenderedPrompt p = Compose(kSentiment, t);
  EXPECT_EQ(p.text, "Classify the review. This is very important to my career. Let's think step by step.");
  EXPECT_EQ(p.base_prompt, "Classify the review.");
  EXPECT_EQ(p.transform_id, "ape+EP02+cot");
  EXPECT_THROW(Compose(kSentiment, Transform::Alternate("ape")), ValidationError);
}

TEST(ComposeTest, CustomSuffix) {
  EXPECT_EQ(Compose("P.", Transform::CustomSuffix("please", "Please.")).text, "P. Please.");
}

TEST(ComposeTest, RejectsInvalidInput) {
  EXPECT_THROW(Compose("", Transform::Vanilla()), ValidationError);
  EXPECT_THROW(Compose("P.", Transform::Stimuli({})), ValidationError);
  EXPECT_THROW(Compose("P.", Transform::Stimuli({"EP02", "EP02"})), ValidationError);
  EXPECT_THROW(Compose("P.", Transform::Stimuli({"EP99"})), ValidationError);
  Transform vanilla_with_payload = Transform::Vanilla();
  vanilla_with_payload.stimuli = {"EP01"};
  EXPECT_THROW(Compose("P.", vanilla_with_payload), ValidationError);
}

TEST(ComposeTest, IsDeterministic) {
  Transform t = Transform::Stimuli({"EP01", "EP04", "EP06"});
  EXPECT_EQ(Compose(kSentiment, t), Compose(kSentiment, t));
}

TEST(ParseTransformTest, CompactFormsRoundTripThroughId) {
  for (const std::string spec : {"vanilla", "cot", "EP02", "EP01+EP04", "EP01+EP04+EP07", "ape",
                                 "ape+EP02", "ape+cot", "ape+EP02+EP03+cot", "suffix:thanks"}) {
    EXPECT_EQ(ParseTransform(spec).Id(), spec);
  }
  EXPECT_EQ(ParseTransform("EP05").kind, TransformKind::kStimulusList);
  EXPECT_TRUE(ParseTransform("EP05").IsSingleStimulus());
  EXPECT_FALSE(ParseTransform("EP01+EP05").IsSingleStimulus());
  EXPECT_EQ(ParseTransform("ape+EP02").kind, TransformKind::kAlternatePrompt);
}

TEST(ParseTransformTest, RejectsMalformedSpecs) {
  EXPECT_THROW(ParseTransform(""), ValidationError);
  EXPECT_THROW(ParseTransform("EP01+"), ValidationError);
  EXPECT_THROW(ParseTransform("ape+cot+EP02"), ValidationError);
  EXPECT_THROW(ParseTransform("ape+cot+cot"), ValidationError);
}

TEST(ParseTransformTest, JsonRoundTrip) {
  for (const auto& t : {Transform::Vanilla(), Transform::ChainOfThought(),
                        Transform::Stimuli({"EP01", "EP02"}), Transform::CustomSuffix("x", "Do it."),
                        Transform::Alternate("ape", {"EP03"}, true)}) {
    EXPECT_EQ(TransformFromJson(TransformToJson(t), "rt"), t) << t.Id();
  }
  EXPECT_EQ(TransformFromJson(Json("EP03"), "rt"), Transform::Stimuli({"EP03"}));
}

TEST(RenderFewShotTest, LaysOutDemonstrationsThenQuery) {
  RenderedPrompt p = Compose("Add the numbers.", Transform::Vanilla());
  std::vector<Demonstration> demos = {{"1 2", "3"}, {"4 5", "9"}};
  EXPECT_EQ(RenderFewShot(p, demos, "2 2"),
            "Add the numbers.\n\nInput: 1 2\nOutput: 3\n\nInput: 4 5\nOutput: 9\n\nInput: 2 2\nOutput: ");
  EXPECT_EQ(RenderFewShot(p, {}, "2 2"), "Add the numbers.\n\nInput: 2 2\nOutput: ");
}

TEST(RenderFewShotTest, CustomFormatAndVerbatimInputs) {
  IoFormat fmt{"Q: ", "A: ", " | ", "\n"};
  RenderedPrompt p = Compose("P.", Transform::Vanilla());
  std::vector<Demonstration> demos = {{"{brace}", "\\n"}};
  EXPECT_EQ(RenderFewShot(p, demos, "x  y", fmt), "P.\nQ: {brace} | A: \\n\nQ: x  y | A: ");
}

TEST(CombinationCatalogTest, DefaultCatalogHasFifteenValidEntries) {
  auto catalog = DefaultCombinationCatalog();
  ASSERT_EQ(catalog.size(), 15u);
  std::set<std::string> ids;
  for (const auto& t : catalog) {
    EXPECT_GE(t.stimuli.size(), 2u);
    EXPECT_LE(t.stimuli.size(), 3u);
    EXPECT_NO_THROW(ValidateTransform(t));
    ids.insert(t.Id());
  }
  EXPECT_EQ(ids.size(), 15u);
  EXPECT_TRUE(ids.count("EP01+EP04+EP06"));
}

TEST(CombinationCatalogTest, RejectsBadTuples) {
  EXPECT_THROW(CombinationCatalog({{"EP01"}}), ValidationError);
  EXPECT_THROW(CombinationCatalog({{"EP01", "EP02", "EP03", "EP04"}}), ValidationError);
  EXPECT_THROW(CombinationCatalog({{"EP01", "EP01"}}), ValidationError);
}

}  // namespace
}  // namespace emostim
