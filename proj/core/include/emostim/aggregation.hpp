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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "emostim/experiment_plan.hpp"

namespace emostim {

/// Aggregate over a stimulus x task matrix.
struct OursAggregate {
  double avg = 0.0;
  /// Max over stimuli of the per-stimulus mean over tasks (default reading).
  double max = 0.0;
  std::string best;
  /// Mean over tasks of the per-task max over stimuli (alternate reading).
  double max_per_task = 0.0;
  /// (stimulus, mean over tasks), in input order.
  std::vector<std::pair<std::string, double>> per_stimulus;
};

/// values[s][t] is stimulus s on task t. Every row must have the same,
/// non-zero length. Ties for best go to the lowest id.
OursAggregate AggregateOursMatrix(const std::vector<std::string>& stimuli,
                                  const std::vector<std::vector<double>>& values);

/// `results` must come from one model and setting (temperature, shots,
/// metric). Seeds are averaged first. Throws, listing them, when a
/// (task, stimulus) cell is missing or has no value. An empty `stimuli` list
/// uses every single-stimulus transform present.
OursAggregate AggregateOurs(std::span<const RunResult> results,
                            const std::vector<std::string>& stimuli = {});

double RelativeGain(double with_prompt, double vanilla);

/// Per-stimulus mean over (task, model) cells of single-stimulus results,
/// descending; ties in id order.
std::vector<std::pair<std::string, double>> RankStimuli(std::span<const RunResult> results);

struct TemperaturePoint {
  double vanilla = 0.0;
  double emotion = 0.0;
  double gap = 0.0;
};

/// Per temperature: mean vanilla value over (task, model) and mean
/// EmotionPrompt value (the per-model ours_avg, averaged over models).
std::map<double, TemperaturePoint> TemperatureSweep(std::span<const RunResult> results);

struct CombinationRow {
  std::string combination;
  std::map<std::string, double> values;
  /// True where the combination strictly beats the task's single-stimulus mean.
  std::map<std::string, bool> improved;
};

struct CombinationTable {
  std::vector<std::string> tasks;
  /// Per task, mean over single stimuli ("EP_avg").
  std::map<std::string, double> ep_avg;
  std::vector<CombinationRow> rows;
  std::vector<std::string> warnings;
};

/// Results from one model and setting. `catalog` lists the combination ids to
/// tabulate; empty means every multi-stimulus transform present.
CombinationTable CombinationGrid(std::span<const RunResult> results,
                                 const std::vector<std::string>& catalog = {});

enum class GainArm { kOursMax, kOursAvg };

std::string_view ToString(GainArm arm);
GainArm ParseGainArm(std::string_view text);

struct ModelSummary {
  std::optional<double> original;
  std::optional<double> cot;
  std::optional<double> ours_avg;
  std::optional<double> ours_max;
  std::optional<double> ours_max_per_task;
  std::string best_stimulus;
  std::optional<double> relative_gain;
  /// Alternate prompt transforms (APE and variants): id -> mean over tasks.
  std::map<std::string, double> alternates;
  std::size_t n_seeds = 1;
  /// Standard error over seeds of original / ours_avg / ours_max; only
  /// filled when n_seeds > 1.
  std::map<std::string, double> seed_stderr;
};

struct SettingReport {
  std::size_t shots = 0;
  double temperature = 0.0;
  MetricKind metric = MetricKind::kAccuracy;
  std::vector<std::string> tasks;
  /// In order of first appearance in the results.
  std::vector<std::pair<std::string, ModelSummary>> per_model;
  std::vector<std::pair<std::string, double>> per_stimulus_ranking;
  /// Per model, when combination transforms were run.
  std::vector<std::pair<std::string, CombinationTable>> combinations;
};

struct AggregateReport {
  GainArm gain_arm = GainArm::kOursMax;
  /// Human-readable definition of relative_gain, e.g. "ours_max - original".
  std::string gain_definition;
  std::vector<SettingReport> settings;
  /// Keyed by (shots, metric); only present with two or more temperatures.
  std::vector<std::pair<std::pair<std::size_t, MetricKind>, std::map<double, TemperaturePoint>>>
      temperature_sweeps;
  std::vector<std::string> warnings;
};

struct ReportOptions {
  GainArm gain_arm = GainArm::kOursMax;
};

/// Groups results by (shots, temperature, metric) and summarizes each group.
/// Values of accuracy and pct metrics are multiplied by 100.
AggregateReport BuildReport(std::span<const RunResult> results, const ReportOptions& options = {});

Json AggregateReportToJson(const AggregateReport& report);

}  // namespace emostim
