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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "emostim/json_io.hpp"

namespace emostim {

enum class TaskKind { kFreeResponse, kMultipleChoice, kGenerative };
enum class MatchMode { kExact, kContains, kSet, kNumeric, kMultichoice, kJudged };

/// Which headline metric a task reports. Instruction-induction style tasks
/// report accuracy; BIG-Bench style tasks report the normalized preferred
/// metric; judged question packs report %True / %Info.
enum class TaskMetric { kAccuracy, kNormalizedPreferred, kJudged };

std::string_view ToString(TaskKind kind);
std::string_view ToString(MatchMode mode);
std::string_view ToString(TaskMetric metric);
TaskKind ParseTaskKind(std::string_view text);
MatchMode ParseMatchMode(std::string_view text);
TaskMetric ParseTaskMetric(std::string_view text);

struct Sample {
  /// Unique within the task. Defaults to the zero-based position when the
  /// task file does not name samples.
  std::string id;
  std::string input;
  std::vector<std::string> golds;
  std::optional<std::vector<std::string>> choices;

  bool operator==(const Sample&) const = default;
};

struct Demonstration {
  std::string input;
  std::string output;

  bool operator==(const Demonstration&) const = default;
};

struct TaskSpec {
  std::string id;
  std::string name;
  TaskKind kind = TaskKind::kFreeResponse;
  std::string instruction;
  MatchMode match_mode = MatchMode::kExact;
  std::string provenance;
  std::vector<Sample> samples;
  TaskMetric metric = TaskMetric::kAccuracy;
  /// Raw score treated as expert level by the normalized preferred metric.
  double high = 1.0;

  bool operator==(const TaskSpec&) const = default;
};

/// Immutable, id-sorted collection of tasks. Safe to share across threads.
class TaskSet {
 public:
  TaskSet() = default;
  TaskSet(std::vector<TaskSpec> tasks, std::vector<std::string> warnings = {});

  const std::vector<TaskSpec>& tasks() const { return tasks_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t size() const { return tasks_.size(); }
  bool empty() const { return tasks_.empty(); }

  /// nullptr when absent.
  const TaskSpec* Find(std::string_view id) const;
  const TaskSpec& At(std::string_view id) const;

  bool operator==(const TaskSet& other) const { return tasks_ == other.tasks_; }

 private:
  std::vector<TaskSpec> tasks_;
  std::vector<std::string> warnings_;
};

/// Throws ValidationError naming `source`, the offending field and the reason.
TaskSpec ParseTask(const Json& json, const std::string& source);
void ValidateTask(const TaskSpec& task, const std::string& source);
Json TaskToJson(const TaskSpec& task);

TaskSpec LoadTaskFile(const std::filesystem::path& path);

/// Loads one task file, or every `*.json` file directly inside a directory.
/// Tasks come back sorted by id; duplicate ids are an error.
TaskSet LoadTaskSet(const std::filesystem::path& path);

/// Writes one `<id>.json` per task into `dir`.
void SaveTaskSet(const TaskSet& set, const std::filesystem::path& dir);

struct DemonstrationDraw {
  std::vector<Demonstration> demonstrations;
  /// Positions in task.samples of the drawn items, in draw order.
  std::vector<std::size_t> sample_indices;
  std::vector<std::string> sample_ids;
};

/// Draws `k` distinct samples without replacement. Uses its own
/// Fisher-Yates over mt19937_64 so the draw is identical on every standard
/// library, not only for a fixed (task, k, seed) on one platform.
DemonstrationDraw SampleDemonstrations(const TaskSpec& task, std::size_t k,
                                       std::uint64_t seed);

/// Expected accuracy of uniform guessing: mean over samples of the share of
/// choices that are gold, 0 for non-choice samples and free-response tasks.
double RandomBaseline(const TaskSpec& task);
double RandomBaseline(const std::vector<Sample>& samples);

struct Question {
  std::string id;
  std::string text;
  std::string domain;

  bool operator==(const Question&) const = default;
};

struct QuestionPack {
  std::string id;
  std::vector<Question> questions;

  bool operator==(const QuestionPack&) const = default;
};

QuestionPack ParseQuestionPack(const Json& json, const std::string& source);
QuestionPack LoadQuestionPack(const std::filesystem::path& path);
Json QuestionPackToJson(const QuestionPack& pack);

/// Builds a generative, judge-scored task whose samples are the questions.
TaskSpec QuestionPackToTask(const QuestionPack& pack, std::string instruction);

}  // namespace emostim
