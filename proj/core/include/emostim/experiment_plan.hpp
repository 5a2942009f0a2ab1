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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emostim/json_io.hpp"
#include "emostim/model_spec.hpp"
#include "emostim/prompt_transforms.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {

/// family -> task id -> externally generated prompt text (e.g. APE output).
using AlternatePrompts = std::map<std::string, std::map<std::string, std::string>>;

struct ExperimentPlan {
  /// Task ids; a single "*" selects every task of the corpus.
  std::vector<std::string> tasks;
  std::vector<Transform> transforms;
  std::vector<ModelSpec> models;
  std::size_t shots = 0;
  std::vector<double> temperatures = {0.7};
  std::vector<std::int64_t> seeds = {0};
  std::optional<std::size_t> sample_limit;
  std::size_t parallelism = 1;
  /// Required when a judged task is in the grid.
  std::optional<ModelSpec> judge;
  std::optional<std::filesystem::path> judge_templates_dir;
  AlternatePrompts alternate_prompts;
  IoFormat io_format;

  bool operator==(const ExperimentPlan&) const = default;
};

/// Structural checks that need no corpus: non-empty lists, parallelism >= 1,
/// transforms and model specs valid.
void ValidatePlan(const ExperimentPlan& plan);

/// Accepts, in "transforms", transform strings or objects plus the keywords
/// "stimuli" (EP01..EP11) and "combinations" (the default combination
/// catalog). "alternate_prompts" is an object or a path to one, relative to
/// the plan file.
ExperimentPlan PlanFromJson(const Json& json, const std::string& source,
                            const std::filesystem::path& base_dir = {},
                            const std::optional<std::string>& default_base_url = std::nullopt);
ExperimentPlan LoadPlan(const std::filesystem::path& path,
                        const std::optional<std::string>& default_base_url = std::nullopt);
Json PlanToJson(const ExperimentPlan& plan);

/// Expands the "stimuli" / "combinations" keywords and parses the rest.
std::vector<Transform> ExpandTransforms(std::span<const std::string> specs);

AlternatePrompts AlternatePromptsFromJson(const Json& json, const std::string& source);
AlternatePrompts LoadAlternatePrompts(const std::filesystem::path& path);

enum class MetricKind { kAccuracy, kNormalizedPreferred, kPctTrue, kPctInfo };

std::string_view ToString(MetricKind kind);
MetricKind ParseMetricKind(std::string_view text);

/// One reduced grid cell. `value` is absent when every sample failed.
struct RunResult {
  std::string task_id;
  std::string transform_id;
  std::string model;
  double temperature = 0.0;
  std::size_t shots = 0;
  std::int64_t seed = 0;
  MetricKind metric_kind = MetricKind::kAccuracy;
  std::optional<double> value;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
  std::size_t n_flagged = 0;
  std::string error;

  bool operator==(const RunResult&) const = default;
};

Json RunResultToJson(const RunResult& result);
RunResult RunResultFromJson(const Json& json, const std::string& source);

std::string ResultsToJsonl(std::span<const RunResult> results);
/// Errors name the offending line number.
std::vector<RunResult> ParseResultsJsonl(std::string_view text, const std::string& source);
std::vector<RunResult> ReadResultsJsonl(const std::filesystem::path& path);

}  // namespace emostim
