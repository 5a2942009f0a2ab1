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

#include "emostim/task_corpus.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <spdlog/spdlog.h>

#include "emostim/error.hpp"
#include "random_util.hpp"

namespace emostim {

namespace fs = std::filesystem;

namespace {

template <typename Enum, std::size_t N>
Enum ParseEnum(std::string_view text, const std::pair<Enum, std::string_view> (&table)[N],
               std::string_view what) {
  for (const auto& [value, name] : table) {
    if (name == text) return value;
  }
  throw ValidationError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

template <typename Enum, std::size_t N>
std::string_view EnumName(Enum value, const std::pair<Enum, std::string_view> (&table)[N]) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

constexpr std::pair<TaskKind, std::string_view> kKinds[] = {
    {TaskKind::kFreeResponse, "free_response"},
    {TaskKind::kMultipleChoice, "multiple_choice"},
    {TaskKind::kGenerative, "generative"},
};

constexpr std::pair<MatchMode, std::string_view> kModes[] = {
    {MatchMode::kExact, "exact"},       {MatchMode::kContains, "contains"},
    {MatchMode::kSet, "set"},           {MatchMode::kNumeric, "numeric"},
    {MatchMode::kMultichoice, "multichoice"}, {MatchMode::kJudged, "judged"},
};

constexpr std::pair<TaskMetric, std::string_view> kMetrics[] = {
    {TaskMetric::kAccuracy, "accuracy"},
    {TaskMetric::kNormalizedPreferred, "normalized_preferred"},
    {TaskMetric::kJudged, "judged"},
};

// Re-raises an enum parse failure against the field it came from.
template <typename F>
auto WithField(const JsonFields& fields, std::string_view key, F&& parse) {
  try {
    return parse();
  } catch (const ValidationError& e) {
    fields.Fail(key, e.reason());
  }
}

}  // namespace

std::string_view ToString(TaskKind kind) { return EnumName(kind, kKinds); }
std::string_view ToString(MatchMode mode) { return EnumName(mode, kModes); }
std::string_view ToString(TaskMetric metric) { return EnumName(metric, kMetrics); }
TaskKind ParseTaskKind(std::string_view text) { return ParseEnum(text, kKinds, "task kind"); }
MatchMode ParseMatchMode(std::string_view text) { return ParseEnum(text, kModes, "match mode"); }
TaskMetric ParseTaskMetric(std::string_view text) {
  return ParseEnum(text, kMetrics, "task metric");
}

TaskSet::TaskSet(std::vector<TaskSpec> tasks, std::vector<std::string> warnings)
    : tasks_(std::move(tasks)), warnings_(std::move(warnings)) {
  std::sort(tasks_.begin(), tasks_.end(),
            [](const TaskSpec& a, const TaskSpec& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < tasks_.size(); ++i) {
    if (tasks_[i].id == tasks_[i - 1].id) {
      throw ValidationError("", "id", "duplicate task id '" + tasks_[i].id + "'");
    }
  }
}

const TaskSpec* TaskSet::Find(std::string_view id) const {
  auto it = std::lower_bound(tasks_.begin(), tasks_.end(), id,
                             [](const TaskSpec& t, std::string_view key) { return t.id < key; });
  if (it == tasks_.end() || it->id != id) return nullptr;
  return &*it;
}

const TaskSpec& TaskSet::At(std::string_view id) const {
  const TaskSpec* task = Find(id);
  if (task == nullptr) {
    throw ValidationError("unknown task id '" + std::string(id) + "'");
  }
  return *task;
}

void ValidateTask(const TaskSpec& task, const std::string& source) {
  auto fail = [&](const std::string& field, const std::string& reason) {
    throw ValidationError(source, field, reason);
  };
  if (task.id.empty()) fail("id", "must not be empty");
  if (task.instruction.empty()) fail("instruction", "must not be empty");
  if (task.kind == TaskKind::kMultipleChoice) {
    if (task.match_mode != MatchMode::kMultichoice && task.match_mode != MatchMode::kExact) {
      fail("match_mode", "multiple_choice tasks must use multichoice or exact matching");
    }
  } else if (task.match_mode == MatchMode::kMultichoice) {
    fail("match_mode", "multichoice matching requires kind multiple_choice");
  }
  if (!(task.high > 0.0) && task.metric == TaskMetric::kNormalizedPreferred) {
    fail("high", "must be positive");
  }

  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < task.samples.size(); ++i) {
    const Sample& s = task.samples[i];
    const std::string where = "samples[" + std::to_string(i) + "]";
    if (!seen_ids.insert(s.id).second) fail(where + ".id", "duplicate sample id '" + s.id + "'");
    const bool judged = task.match_mode == MatchMode::kJudged;
    if (s.golds.empty() && !judged) fail(where + ".golds", "at least one gold answer required");
    if (task.kind == TaskKind::kMultipleChoice) {
      if (!s.choices) fail(where + ".choices", "multiple_choice sample '" + s.id + "' lacks choices");
      if (s.choices->size() < 2) fail(where + ".choices", "needs at least 2 choices");
      for (const auto& gold : s.golds) {
        if (std::find(s.choices->begin(), s.choices->end(), gold) == s.choices->end()) {
          fail(where + ".golds", "gold '" + gold + "' is not among the choices");
        }
      }
    } else if (s.choices) {
      fail(where + ".choices", "choices are only allowed on multiple_choice tasks");
    }
  }
}

TaskSpec ParseTask(const Json& json, const std::string& source) {
  JsonFields f(json, source);
  TaskSpec task;
  task.id = f.RequireNonEmptyString("id");
  task.name = f.OptionalString("name").value_or(task.id);
  task.kind = WithField(f, "kind", [&] { return ParseTaskKind(f.RequireString("kind")); });
  task.instruction = f.RequireNonEmptyString("instruction");
  task.match_mode =
      WithField(f, "match_mode", [&] { return ParseMatchMode(f.RequireString("match_mode")); });
  task.provenance = f.OptionalString("provenance").value_or("");
  if (auto metric = f.OptionalString("metric")) {
    task.metric = WithField(f, "metric", [&] { return ParseTaskMetric(*metric); });
  } else if (task.match_mode == MatchMode::kJudged) {
    task.metric = TaskMetric::kJudged;
  }
  task.high = f.OptionalNumber("high").value_or(1.0);

  const Json& samples = f.RequireArray("samples");
  task.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    JsonFields sf(samples[i], source, "samples[" + std::to_string(i) + "]");
    Sample s;
    s.id = sf.OptionalString("id").value_or(std::to_string(i));
    s.input = sf.RequireString("input");
    s.golds = sf.OptionalStringArray("golds").value_or(std::vector<std::string>{});
    s.choices = sf.OptionalStringArray("choices");
    task.samples.push_back(std::move(s));
  }
  ValidateTask(task, source);
  return task;
}

Json TaskToJson(const TaskSpec& task) {
  Json samples = Json::array();
  for (const Sample& s : task.samples) {
    Json js = {{"id", s.id}, {"input", s.input}, {"golds", s.golds}};
    if (s.choices) js["choices"] = *s.choices;
    samples.push_back(std::move(js));
  }
  return Json{{"id", task.id},
              {"name", task.name},
              {"kind", ToString(task.kind)},
              {"instruction", task.instruction},
              {"match_mode", ToString(task.match_mode)},
              {"metric", ToString(task.metric)},
              {"high", task.high},
              {"provenance", task.provenance},
              {"samples", std::move(samples)}};
}

TaskSpec LoadTaskFile(const fs::path& path) {
  return ParseTask(ReadJsonFile(path), path.string());
}

TaskSet LoadTaskSet(const fs::path& path) {
  if (!fs::exists(path)) {
    throw ValidationError(path.string(), "", "task path does not exist");
  }
  std::vector<fs::path> files;
  if (fs::is_directory(path)) {
    for (const auto& entry : fs::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(path);
  }

  std::vector<std::string> warnings;
  if (files.empty()) {
    warnings.push_back("no task files found in " + path.string());
    spdlog::warn("no task files found in {}", path.string());
  }
  std::vector<TaskSpec> tasks;
  tasks.reserve(files.size());
  std::set<std::string> ids;
  for (const auto& file : files) {
    TaskSpec task = LoadTaskFile(file);
    if (!ids.insert(task.id).second) {
      throw ValidationError(file.string(), "id", "duplicate task id '" + task.id + "'");
    }
    if (task.samples.empty()) {
      warnings.push_back(file.string() + ": task '" + task.id + "' has no samples");
    }
    tasks.push_back(std::move(task));
  }
  return TaskSet(std::move(tasks), std::move(warnings));
}

void SaveTaskSet(const TaskSet& set, const fs::path& dir) {
  fs::create_directories(dir);
  for (const TaskSpec& task : set.tasks()) {
    WriteFileAtomically(dir / (task.id + ".json"), TaskToJson(task).dump(2) + "\n");
  }
}

DemonstrationDraw SampleDemonstrations(const TaskSpec& task, std::size_t k, std::uint64_t seed) {
  if (k > task.samples.size()) {
    throw ValidationError("", "shots",
                          "demonstration pool exhausted: task '" + task.id + "' has " +
                              std::to_string(task.samples.size()) + " samples, " +
                              std::to_string(k) + " requested");
  }
  DemonstrationDraw draw;
  if (k == 0) return draw;

  std::vector<std::size_t> order(task.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots end up holding the draw.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(detail::UniformBelow(rng, order.size() - i));
    std::swap(order[i], order[j]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Sample& s = task.samples[order[i]];
    if (s.golds.empty() || s.golds.front().empty()) {
      throw ValidationError("", "samples[" + std::to_string(order[i]) + "].golds",
                            "sample drawn as a demonstration has no gold answer");
    }
    if (s.input.empty()) {
      throw ValidationError("", "samples[" + std::to_string(order[i]) + "].input",
                            "sample drawn as a demonstration has an empty input");
    }
    draw.demonstrations.push_back({s.input, s.golds.front()});
    draw.sample_indices.push_back(order[i]);
    draw.sample_ids.push_back(s.id);
  }
  return draw;
}

double RandomBaseline(const std::vector<Sample>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const Sample& s : samples) {
    if (!s.choices || s.choices->empty()) continue;
    // A uniform pick is right with probability |golds among choices| / |choices|.
    std::size_t hits = 0;
    for (const auto& c : *s.choices) {
      if (std::find(s.golds.begin(), s.golds.end(), c) != s.golds.end()) ++hits;
    }
    sum += static_cast<double>(hits) / static_cast<double>(s.choices->size());
  }
  return sum / static_cast<double>(samples.size());
}

double RandomBaseline(const TaskSpec& task) {
  if (task.kind != TaskKind::kMultipleChoice) return 0.0;
  return RandomBaseline(task.samples);
}

QuestionPack ParseQuestionPack(const Json& json, const std::string& source) {
  JsonFields f(json, source);
  QuestionPack pack;
  pack.id = f.RequireNonEmptyString("id");
  const Json& questions = f.RequireArray("questions");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < questions.size(); ++i) {
    JsonFields qf(questions[i], source, "questions[" + std::to_string(i) + "]");
    Question q;
    q.id = qf.RequireNonEmptyString("id");
    q.text = qf.RequireNonEmptyString("text");
    q.domain = qf.OptionalString("domain").value_or("");
    if (!ids.insert(q.id).second) qf.Fail("id", "duplicate question id '" + q.id + "'");
    pack.questions.push_back(std::move(q));
  }
  return pack;
}

QuestionPack LoadQuestionPack(const fs::path& path) {
  return ParseQuestionPack(ReadJsonFile(path), path.string());
}

Json QuestionPackToJson(const QuestionPack& pack) {
  Json questions = Json::array();
  for (const Question& q : pack.questions) {
    questions.push_back({{"id", q.id}, {"text", q.text}, {"domain", q.domain}});
  }
  return Json{{"id", pack.id}, {"questions", std::move(questions)}};
}

TaskSpec QuestionPackToTask(const QuestionPack& pack, std::string instruction) {
  TaskSpec task;
  task.id = pack.id;
  task.name = pack.id;
  task.kind = TaskKind::kGenerative;
  task.instruction = std::move(instruction);
  task.match_mode = MatchMode::kJudged;
  task.metric = TaskMetric::kJudged;
  task.provenance = "question-pack";
  for (const Question& q : pack.questions) {
    task.samples.push_back(Sample{q.id, q.text, {}, std::nullopt});
  }
  ValidateTask(task, pack.id);
  return task;
}

}  // namespace emostim
