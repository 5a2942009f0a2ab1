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

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emostim/error.hpp"
#include "emostim/model_client.hpp"
#include "emostim/model_spec.hpp"

namespace emostim {

enum class JudgeDimension { kTruthful, kInformative };
enum class RubricName { kPerformance, kTruthfulness, kResponsibility };

std::string_view ToString(JudgeDimension dimension);
std::string_view ToString(RubricName name);
RubricName ParseRubricName(std::string_view text);

struct Rubric {
  RubricName name = RubricName::kPerformance;
  /// scale[i] describes score i + 1.
  std::array<std::string, 5> scale;
};

/// The three human-study rubrics with their verbatim scale descriptions.
const std::vector<Rubric>& BuiltinRubrics();
const Rubric& BuiltinRubric(RubricName name);

/// Throws ValidationError when a scale point is empty.
void ValidateRubric(const Rubric& rubric);

/// Judge prompt templates keyed by name: "truthful", "informative",
/// "rubric-performance", "rubric-truthfulness", "rubric-responsibility".
/// Placeholders: {question}, {response}, {rubric}, {rubric_name}.
class JudgeTemplates {
 public:
  /// Templates compiled in from data/judges.
  static JudgeTemplates Builtin();
  /// Starts from the builtins and replaces every `<name>.txt` found in `dir`.
  static JudgeTemplates LoadDir(const std::filesystem::path& dir);

  const std::string& Get(std::string_view name) const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

/// Substitutes `{key}` placeholders in one pass; unknown placeholders are
/// left untouched.
std::string RenderTemplate(std::string_view templ, const std::map<std::string, std::string>& values);

std::string RenderBinaryJudgePrompt(const JudgeTemplates& templates, JudgeDimension dimension,
                                    std::string_view question, std::string_view response);
std::string RenderRubricJudgePrompt(const JudgeTemplates& templates, const Rubric& rubric,
                                    std::string_view question, std::string_view response);

/// "yes"/"no" as the first word, case and punctuation insensitive.
std::optional<bool> ParseBinaryVerdict(std::string_view output);
/// First integer in the output when it lies in 1..5.
std::optional<int> ParseRubricVerdict(std::string_view output);

/// Total judge calls for one verdict: the first ask plus two re-asks.
inline constexpr int kJudgeAttempts = 3;

class JudgeError : public Error {
 public:
  JudgeError(const std::string& message, std::string raw_output)
      : Error(ErrorKind::kData, message), raw_output_(std::move(raw_output)) {}

  const std::string& raw_output() const noexcept { return raw_output_; }

 private:
  std::string raw_output_;
};

bool JudgeBinary(ModelClient& client, const ModelSpec& judge, std::string_view question,
                 std::string_view response, JudgeDimension dimension,
                 const JudgeTemplates& templates = JudgeTemplates::Builtin());

int JudgeRubric(ModelClient& client, const ModelSpec& judge, std::string_view question,
                std::string_view response, const Rubric& rubric,
                const JudgeTemplates& templates = JudgeTemplates::Builtin());

}  // namespace emostim
