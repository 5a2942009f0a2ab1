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

#include <atomic>
#include <cstddef>
#include <functional>
#include <vector>

#include "emostim/experiment_plan.hpp"
#include "emostim/model_client.hpp"
#include "emostim/scoring.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {

struct RunProgress {
  std::size_t completed = 0;
  std::size_t total = 0;
  std::size_t failed = 0;
};

struct RunOptions {
  /// Set from a signal handler to stop handing out new samples. Requests in
  /// flight finish and are cached; unfinished cells are dropped.
  const std::atomic<bool>* cancel = nullptr;
  /// Called from worker threads, serialized by the runner.
  std::function<void(const RunProgress&)> progress;
};

/// The per-sample records of one grid cell.
struct CellScores {
  std::string transform_id;
  std::string model;
  double temperature = 0.0;
  std::int64_t seed = 0;
  std::vector<ScoreRecord> records;
};

/// JSONL of every record tagged with its cell (transform_id, model,
/// temperature, seed).
std::string CellScoresToJsonl(const std::vector<CellScores>& cells);

struct RunOutput {
  /// Grid order: task, transform, model, temperature, seed.
  std::vector<RunResult> results;
  /// Per-sample records of every reduced cell, in the same order.
  std::vector<CellScores> scores;
  bool cancelled = false;
};

/// Resolves every plan id against `corpus` before any request is made and
/// throws ValidationError for unknown tasks, alternate-prompt families without
/// a prompt for a task, judged tasks without a judge, or too few samples.
void ResolvePlan(const ExperimentPlan& plan, const TaskSet& corpus);

/// Runs the grid. A cell whose samples all fail yields a result without a
/// value; ConfigError (credentials) aborts the whole run.
RunOutput Run(const ExperimentPlan& plan, const TaskSet& corpus, ModelClient& client,
              const RunOptions& options = {});

}  // namespace emostim
