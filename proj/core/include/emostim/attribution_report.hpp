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
#include <map>
#include <string>
#include <vector>

#include "emostim/json_io.hpp"
#include "emostim/reporting.hpp"

namespace emostim {

struct TokenAttribution {
  std::string token;
  double score = 0.0;

  bool operator==(const TokenAttribution&) const = default;
};

/// Output of the attribution tool for one task.
struct AttributionResult {
  std::string task_id;
  /// transform_id -> tokens in prompt order.
  std::map<std::string, std::vector<TokenAttribution>> per_variant;
  std::map<std::string, double> positive_word_share;
  std::string lexicon_version;

  bool operator==(const AttributionResult&) const = default;
};

/// Enforces the contract: scores finite and >= 0, shares in [0, 1],
/// lexicon_version present. Accepts one object or an array of them.
std::vector<AttributionResult> ParseAttribution(const Json& json, const std::string& source);
std::vector<AttributionResult> LoadAttribution(const std::filesystem::path& path);
Json AttributionToJson(const std::vector<AttributionResult>& results);

/// Scores min-max normalized within each prompt; a constant prompt maps to 0.
std::vector<double> NormalizeScores(const std::vector<TokenAttribution>& tokens);

struct AttributionRendering {
  std::string markdown;
  PlotData heatmap;
};

/// Token tables sorted by importance and a per-task positive-word share
/// summary ("positive-word share 70%").
AttributionRendering RenderAttribution(const std::vector<AttributionResult>& results);

}  // namespace emostim
