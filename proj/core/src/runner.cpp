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

#include "emostim/runner.hpp"

#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "emostim/error.hpp"
#include "emostim/judge.hpp"

namespace emostim {

namespace {

bool IsJudgedTask(const TaskSpec& task) {
  return task.match_mode == MatchMode::kJudged || task.metric == TaskMetric::kJudged;
}

std::vector<const TaskSpec*> SelectTasks(const ExperimentPlan& plan, const TaskSet& corpus) {
  std::vector<const TaskSpec*> out;
  if (plan.tasks.size() == 1 && plan.tasks.front() == "*") {
    for (const TaskSpec& t : corpus.tasks()) out.push_back(&t);
    return out;
  }
  std::set<std::string> seen;
  for (const std::string& id : plan.tasks) {
    const TaskSpec* t = corpus.Find(id);
    if (t == nullptr) throw ValidationError("", "tasks", "unknown task id '" + id + "'");
    if (!seen.insert(id).second) throw ValidationError("", "tasks", "task '" + id + "' listed twice");
    out.push_back(t);
  }
  return out;
}

struct Cell {
  const TaskSpec* task = nullptr;
  ModelSpec model;
  double temperature = 0.0;
  std::int64_t seed = 0;
  std::string transform_id;
  std::shared_ptr<const DemonstrationDraw> demos;
  RenderedPrompt rendered;
  std::vector<std::size_t> eval_indices;
  std::size_t first_job = 0;
};

struct Outcome {
  bool done = false;
  bool ok = false;
  ScoreRecord record;
  std::string error;
};

std::vector<std::size_t> EvalIndices(const TaskSpec& task, const DemonstrationDraw& draw,
                                     const std::optional<std::size_t>& limit) {
  std::set<std::size_t> excluded(draw.sample_indices.begin(), draw.sample_indices.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < task.samples.size(); ++i) {
    if (excluded.count(i) != 0) continue;
    if (limit && out.size() == *limit) break;
    out.push_back(i);
  }
  return out;
}

// In set mode the golds list holds the elements of a single answer, so mocks
// see them joined into one gold.
Sample MockContext(const TaskSpec& task, const Sample& sample) {
  if (task.match_mode != MatchMode::kSet || sample.golds.size() < 2) return sample;
  Sample out = sample;
  std::string joined;
  for (const std::string& g : sample.golds) joined += (joined.empty() ? "" : ", ") + g;
  out.golds = {joined};
  return out;
}

}  // namespace

std::string CellScoresToJsonl(const std::vector<CellScores>& cells) {
  std::string out;
  for (const CellScores& cell : cells) {
    for (const ScoreRecord& r : cell.records) {
      Json j = ScoreRecordToJson(r);
      j["transform_id"] = cell.transform_id;
      j["model"] = cell.model;
      j["temperature"] = cell.temperature;
      j["seed"] = cell.seed;
      out += j.dump(-1, ' ', false, Json::error_handler_t::replace);
      out += '\n';
    }
  }
  return out;
}

void ResolvePlan(const ExperimentPlan& plan, const TaskSet& corpus) {
  ValidatePlan(plan);
  for (const TaskSpec* task : SelectTasks(plan, corpus)) {
    if (IsJudgedTask(*task) && !plan.judge) {
      throw ValidationError("", "judge", "task '" + task->id + "' is judged but the plan has no judge model");
    }
    if (task->samples.size() <= plan.shots) {
      throw ValidationError("", "shots",
                            "task '" + task->id + "' has " + std::to_string(task->samples.size()) +
                                " samples; " + std::to_string(plan.shots) +
                                " demonstrations leave none to evaluate");
    }
    for (const Transform& t : plan.transforms) {
      if (t.kind != TransformKind::kAlternatePrompt || !t.prompt_override.empty()) continue;
      auto family = plan.alternate_prompts.find(t.source);
      if (family == plan.alternate_prompts.end()) {
        throw ValidationError("", "alternate_prompts", "no prompts for family '" + t.source + "'");
      }
      if (family->second.count(task->id) == 0) {
        throw ValidationError("", "alternate_prompts",
                              "family '" + t.source + "' has no prompt for task '" + task->id + "'");
      }
    }
  }
}

RunOutput Run(const ExperimentPlan& plan, const TaskSet& corpus, ModelClient& client,
              const RunOptions& options) {
  ResolvePlan(plan, corpus);
  const std::vector<const TaskSpec*> tasks = SelectTasks(plan, corpus);
  for (const ModelSpec& m : plan.models) client.RequireCredentials(m);
  if (plan.judge) client.RequireCredentials(*plan.judge);

  const JudgeTemplates templates = plan.judge_templates_dir
                                       ? JudgeTemplates::LoadDir(*plan.judge_templates_dir)
                                       : JudgeTemplates::Builtin();

  // Build cells in grid order. Demonstrations depend on (task, seed) only.
  std::vector<Cell> cells;
  std::size_t n_jobs = 0;
  for (const TaskSpec* task : tasks) {
    std::map<std::int64_t, std::shared_ptr<const DemonstrationDraw>> draws;
    for (std::int64_t seed : plan.seeds) {
      draws[seed] = std::make_shared<const DemonstrationDraw>(
          SampleDemonstrations(*task, plan.shots, static_cast<std::uint64_t>(seed)));
    }
    for (const Transform& transform : plan.transforms) {
      Transform resolved = transform;
      if (resolved.kind == TransformKind::kAlternatePrompt && resolved.prompt_override.empty()) {
        resolved.prompt_override = plan.alternate_prompts.at(resolved.source).at(task->id);
      }
      const RenderedPrompt rendered = Compose(task->instruction, resolved);
      for (const ModelSpec& model : plan.models) {
        for (double temperature : plan.temperatures) {
          for (std::int64_t seed : plan.seeds) {
            Cell cell;
            cell.task = task;
            cell.model = model;
            cell.model.params.temperature = temperature;
            if (!cell.model.params.seed) cell.model.params.seed = seed;
            cell.temperature = temperature;
            cell.seed = seed;
            cell.transform_id = rendered.transform_id;
            cell.demos = draws.at(seed);
            cell.rendered = rendered;
            cell.eval_indices = EvalIndices(*task, *cell.demos, plan.sample_limit);
            cell.first_job = n_jobs;
            n_jobs += cell.eval_indices.size();
            cells.push_back(std::move(cell));
          }
        }
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> jobs;  // (cell, position in eval_indices)
  jobs.reserve(n_jobs);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    for (std::size_t k = 0; k < cells[c].eval_indices.size(); ++k) jobs.emplace_back(c, k);
  }

  std::vector<Outcome> outcomes(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  std::exception_ptr fatal;
  RunProgress progress;
  progress.total = jobs.size();

  auto cancelled = [&] {
    return abort.load() || (options.cancel != nullptr && options.cancel->load());
  };

  auto work = [&] {
    for (;;) {
      if (cancelled()) return;
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size()) return;
      const Cell& cell = cells[jobs[j].first];
      const Sample& sample = cell.task->samples[cell.eval_indices[jobs[j].second]];
      Outcome outcome;
      try {
        const std::string prompt =
            RenderFewShot(cell.rendered, cell.demos->demonstrations, sample.input, plan.io_format);
        const Sample context = MockContext(*cell.task, sample);
        const CompletionRecord completion = client.Complete(cell.model, prompt, &context);
        outcome.record = ScoreSample(*cell.task, sample, completion.response_text);
        if (IsJudgedTask(*cell.task)) {
          JudgeLabels labels;
          labels.truthful = JudgeBinary(client, *plan.judge, sample.input,
                                        completion.response_text, JudgeDimension::kTruthful,
                                        templates);
          labels.informative = JudgeBinary(client, *plan.judge, sample.input,
                                           completion.response_text, JudgeDimension::kInformative,
                                           templates);
          outcome.record.judge_labels = labels;
        }
        outcome.ok = true;
      } catch (const ConfigError&) {
        std::lock_guard<std::mutex> lock(mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
        return;
      } catch (const std::exception& e) {
        outcome.error = e.what();
      }
      outcome.done = true;
      std::lock_guard<std::mutex> lock(mu);
      outcomes[j] = std::move(outcome);
      ++progress.completed;
      if (!outcomes[j].ok) ++progress.failed;
      if (options.progress) options.progress(progress);
    }
  };

  const std::size_t n_threads = std::min(plan.parallelism, std::max<std::size_t>(jobs.size(), 1));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);

  RunOutput out;
  for (const Cell& cell : cells) {
    const std::size_t n = cell.eval_indices.size();
    bool complete = true;
    for (std::size_t k = 0; k < n; ++k) {
      if (!outcomes[cell.first_job + k].done) complete = false;
    }
    if (!complete) {
      out.cancelled = true;
      continue;
    }

    std::vector<ScoreRecord> ok;
    std::vector<Sample> ok_samples;
    std::size_t failed = 0;
    std::string first_error;
    for (std::size_t k = 0; k < n; ++k) {
      Outcome& o = outcomes[cell.first_job + k];
      if (o.ok) {
        ok_samples.push_back(cell.task->samples[cell.eval_indices[k]]);
        ok.push_back(std::move(o.record));
      } else {
        ++failed;
        if (first_error.empty()) first_error = o.error;
      }
    }

    RunResult base;
    base.task_id = cell.task->id;
    base.transform_id = cell.transform_id;
    base.model = cell.model.name;
    base.temperature = cell.temperature;
    base.shots = plan.shots;
    base.seed = cell.seed;
    base.n_samples = ok.size();
    base.n_failed = failed;
    for (const ScoreRecord& r : ok) {
      if (r.flagged) ++base.n_flagged;
    }
    if (failed > 0) {
      base.error = std::to_string(failed) + " of " + std::to_string(n) +
                   " samples failed; first: " + first_error;
      spdlog::warn("{} / {} / {}: {}", base.task_id, base.transform_id, base.model, base.error);
    }

    auto emit = [&](MetricKind kind, std::optional<double> value) {
      RunResult r = base;
      r.metric_kind = kind;
      r.value = value;
      out.results.push_back(std::move(r));
    };
    const bool any = !ok.empty();
    if (IsJudgedTask(*cell.task)) {
      emit(MetricKind::kPctTrue, any ? std::optional<double>(PercentTrue(ok)) : std::nullopt);
      emit(MetricKind::kPctInfo, any ? std::optional<double>(PercentInformative(ok)) : std::nullopt);
    } else if (cell.task->metric == TaskMetric::kNormalizedPreferred) {
      std::optional<double> value;
      if (any) value = NormalizedPreferred(TaskAccuracy(ok), RandomBaseline(ok_samples), cell.task->high);
      emit(MetricKind::kNormalizedPreferred, value);
    } else {
      emit(MetricKind::kAccuracy, any ? std::optional<double>(TaskAccuracy(ok)) : std::nullopt);
    }
    out.scores.push_back({cell.transform_id, cell.model.name, cell.temperature, cell.seed, std::move(ok)});
  }
  return out;
}

}  // namespace emostim
