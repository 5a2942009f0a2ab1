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

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emostim/json_io.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {

enum class Theory {
  kSelfMonitoring,
  kSocialCognitive,
  kCognitiveEmotionRegulation,
  kCompound,
};

enum class StimulusCategory { kSocialInfluence, kSelfEsteemMotivation };

std::string_view ToString(Theory theory);
std::string_view ToString(StimulusCategory category);
Theory ParseTheory(std::string_view text);
StimulusCategory ParseStimulusCategory(std::string_view text);

/// One emotional stimulus sentence. Built-in ids are EP01..EP11; user
/// libraries may add their own ids.
struct Stimulus {
  std::string id;
  std::string text;
  /// A stimulus can draw on more than one theory (EP03 is both
  /// self-monitoring and cognitive emotion regulation).
  std::vector<Theory> theories;
  StimulusCategory category = StimulusCategory::kSocialInfluence;

  bool operator==(const Stimulus&) const = default;
};

/// The eleven built-in stimuli, EP01..EP11, in id order.
std::vector<Stimulus> BuiltinStimuli();

class StimulusLibrary {
 public:
  explicit StimulusLibrary(std::vector<Stimulus> stimuli);

  static const StimulusLibrary& Builtin();
  /// Same schema as the shipped stimuli.json.
  static StimulusLibrary FromJson(const Json& json, const std::string& source);
  static StimulusLibrary Load(const std::filesystem::path& path);

  const Stimulus* Find(std::string_view id) const;
  const Stimulus& At(std::string_view id) const;
  const std::vector<Stimulus>& stimuli() const { return stimuli_; }
  std::vector<std::string> Ids() const;

 private:
  std::vector<Stimulus> stimuli_;
};

Json StimuliToJson(const std::vector<Stimulus>& stimuli);

inline constexpr std::string_view kChainOfThoughtSuffix = " Let's think step by step.";

enum class TransformKind { kVanilla, kStimulusList, kCot, kCustomSuffix, kAlternatePrompt };

std::string_view ToString(TransformKind kind);

/// A prompt transformation. Alternate prompts (e.g. APE-generated
/// instructions) replace the base prompt and may still take stimuli or the
/// CoT suffix; when `prompt_override` is empty the runner resolves it per
/// task from the prompt family named by `source`.
struct Transform {
  TransformKind kind = TransformKind::kVanilla;
  std::vector<std::string> stimuli;
  std::string suffix;
  std::string prompt_override;
  std::string source;
  bool append_cot = false;

  /// Stable identifier used in result files: "vanilla", "cot", "EP02",
  /// "EP01+EP04", "ape", "ape+EP02", "ape+cot", "suffix:<label>".
  std::string Id() const;

  /// True for a stimulus_list with exactly one stimulus.
  bool IsSingleStimulus() const;

  static Transform Vanilla();
  static Transform ChainOfThought();
  static Transform Stimuli(std::vector<std::string> ids);
  static Transform CustomSuffix(std::string label, std::string suffix);
  static Transform Alternate(std::string source, std::vector<std::string> stimuli = {},
                             bool append_cot = false, std::string prompt_override = {});

  bool operator==(const Transform&) const = default;
};

/// Throws ValidationError for payload/kind mismatches, empty or duplicated
/// stimulus lists, and ids absent from `library`.
void ValidateTransform(const Transform& transform,
                       const StimulusLibrary& library = StimulusLibrary::Builtin());

/// Parses the compact textual form accepted on the command line; see
/// Transform::Id for the grammar. "suffix:<text>" uses the text as label.
Transform ParseTransform(std::string_view spec);
Transform TransformFromJson(const Json& json, const std::string& source);
Json TransformToJson(const Transform& transform);

struct RenderedPrompt {
  std::string text;
  std::string base_prompt;
  std::string transform_id;
  std::size_t demo_count = 0;

  bool operator==(const RenderedPrompt&) const = default;
};

/// Appends stimuli (single-space joined, in list order), the CoT suffix or a
/// custom suffix to the base prompt. Pure and deterministic.
RenderedPrompt Compose(std::string_view base_prompt, const Transform& transform,
                       const StimulusLibrary& library = StimulusLibrary::Builtin());

struct IoFormat {
  std::string input_label = "Input: ";
  std::string output_label = "Output: ";
  std::string separator = "\n";
  /// Placed between the prompt and each block.
  std::string block_separator = "\n\n";

  bool operator==(const IoFormat&) const = default;
};

/// Prompt text, then one "{input_label}{input}{separator}{output_label}{output}"
/// block per demonstration, then the query block with an empty output slot.
/// Inputs are inserted verbatim.
std::string RenderFewShot(const RenderedPrompt& rendered,
                          std::span<const Demonstration> demos,
                          std::string_view query_input, const IoFormat& format = {});

/// One stimulus_list transform per tuple (size 2 or 3, duplicate-free).
std::vector<Transform> CombinationCatalog(
    const std::vector<std::vector<std::string>>& tuples,
    const StimulusLibrary& library = StimulusLibrary::Builtin());

/// The fifteen pair/triple combinations of the stimulus-combination study.
std::vector<Transform> DefaultCombinationCatalog();

}  // namespace emostim
