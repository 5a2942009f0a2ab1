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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emostim/json_io.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {

/// Lowercase, Unicode NFC, whitespace runs collapsed to one space, leading and
/// trailing whitespace and the characters . , ; : ! ? " ' stripped.
/// Idempotent.
std::string NormalizeAnswer(std::string_view text);

/// Parses a whole string as a number: decimal literals ("32", "-1.5",
/// "1,000") or English number words from zero to one hundred
/// ("twenty-six", "one hundred"). Input is normalized first.
std::optional<double> ParseNumber(std::string_view text);

/// Views of a free-text response tried in order by the explanation-tolerant
/// extractors: text after the last "answer is"/"answer:" marker, the whole
/// response, its leading clause, first line and final line. Duplicates and
/// empties are dropped; entries are not normalized.
std::vector<std::string> AnswerCandidates(std::string_view response);

struct JudgeLabels {
  std::optional<bool> truthful;
  std::optional<bool> informative;
  std::map<std::string, int> rubric_scores;

  bool operator==(const JudgeLabels&) const = default;
};

struct ScoreRecord {
  std::string task_id;
  std::size_t sample_index = 0;
  std::string sample_id;
  std::string raw_response;
  std::string extracted_answer;
  double correct = 0.0;
  /// Set when extraction was ambiguous (multichoice matched several choices).
  bool flagged = false;
  std::string flag_reason;
  std::optional<JudgeLabels> judge_labels;

  bool operator==(const ScoreRecord&) const = default;
};

/// Pure function of (task, sample, response). `sample` must belong to `task`.
/// Judged tasks get correct = 0 here; judge labels are attached separately.
ScoreRecord ScoreSample(const TaskSpec& task, const Sample& sample, std::string_view response);

/// Mean of `correct`. Throws on an empty list or mixed task ids.
double TaskAccuracy(std::span<const ScoreRecord> records);

/// 100 * (raw - random_baseline) / (high - random_baseline). Negative when
/// worse than guessing. Throws when high <= random_baseline.
double NormalizedPreferred(double raw, double random_baseline, double high = 1.0);

/// Fraction of records whose judge marked them truthful / informative.
/// Records without the label are skipped; throws when none carry it.
double PercentTrue(std::span<const ScoreRecord> records);
double PercentInformative(std::span<const ScoreRecord> records);

Json ScoreRecordToJson(const ScoreRecord& record);
ScoreRecord ScoreRecordFromJson(const Json& json, const std::string& source);

/// One record per line.
std::string ScoresToJsonl(std::span<const ScoreRecord> records);
std::vector<ScoreRecord> ReadScoresJsonl(const std::filesystem::path& path);

}  // namespace emostim
