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

#include "emostim/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "emostim/error.hpp"
#include "emostim/prompt_transforms.hpp"

namespace emostim {

namespace {

enum class Arm { kVanilla, kCot, kStimulus, kCombination, kOther };

Arm Classify(const std::string& transform_id) {
  if (transform_id == "vanilla") return Arm::kVanilla;
  if (transform_id == "cot") return Arm::kCot;
  try {
    const Transform t = ParseTransform(transform_id);
    if (t.kind == TransformKind::kStimulusList) {
      return t.stimuli.size() == 1 ? Arm::kStimulus : Arm::kCombination;
    }
  } catch (const ValidationError&) {
  }
  return Arm::kOther;
}

// Seed-averaged value of one (task, transform, model, temperature, shots,
// metric) cell.
struct CellKey {
  std::string task;
  std::string transform;
  std::string model;
  double temperature;
  std::size_t shots;
  MetricKind metric;

  auto Tie() const { return std::tie(task, transform, model, temperature, shots, metric); }
  bool operator<(const CellKey& o) const { return Tie() < o.Tie(); }
};

struct CellValue {
  double sum = 0.0;
  std::size_t n = 0;
  std::optional<double> Mean() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

std::map<CellKey, CellValue> CollapseSeeds(std::span<const RunResult> results) {
  std::map<CellKey, CellValue> out;
  for (const RunResult& r : results) {
    CellValue& v = out[{r.task_id, r.transform_id, r.model, r.temperature, r.shots, r.metric_kind}];
    if (r.value) {
      v.sum += *r.value;
      ++v.n;
    }
  }
  return out;
}

void RequireSingleGroup(std::span<const RunResult> results, const char* what) {
  if (results.empty()) throw Error(ErrorKind::kData, std::string(what) + " of an empty result list");
  const RunResult& f = results.front();
  for (const RunResult& r : results) {
    if (r.model != f.model || r.temperature != f.temperature || r.shots != f.shots ||
        r.metric_kind != f.metric_kind) {
      throw Error(ErrorKind::kData, std::string(what) +
                                        " needs results from one model and setting; found '" +
                                        f.model + "' and '" + r.model + "' or differing settings");
    }
  }
}

double Mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double StdErr(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = Mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

double Scaled(MetricKind kind, double value) {
  return kind == MetricKind::kNormalizedPreferred ? value : 100.0 * value;
}

// Mean over tasks of one transform arm for one model; nullopt when absent.
std::optional<double> ArmMean(const std::map<CellKey, CellValue>& cells, const std::string& transform,
                              const std::string& model, const std::vector<std::string>& tasks,
                              std::vector<std::string>* missing) {
  std::vector<double> values;
  for (const auto& [key, value] : cells) {
    if (key.transform != transform || key.model != model) continue;
    if (auto m = value.Mean()) values.push_back(*m);
  }
  if (values.empty()) return std::nullopt;
  if (missing != nullptr && values.size() < tasks.size()) {
    missing->push_back(transform + " for " + model + " covers " + std::to_string(values.size()) +
                       " of " + std::to_string(tasks.size()) + " tasks");
  }
  return Mean(values);
}

}  // namespace

OursAggregate AggregateOursMatrix(const std::vector<std::string>& stimuli,
                                  const std::vector<std::vector<double>>& values) {
  if (stimuli.empty()) throw Error(ErrorKind::kData, "aggregate over zero stimuli");
  if (values.size() != stimuli.size()) {
    throw Error(ErrorKind::kData, "value matrix has " + std::to_string(values.size()) +
                                      " rows for " + std::to_string(stimuli.size()) + " stimuli");
  }
  const std::size_t n_tasks = values.front().size();
  if (n_tasks == 0) throw Error(ErrorKind::kData, "aggregate over zero tasks");
  for (const auto& row : values) {
    if (row.size() != n_tasks) throw Error(ErrorKind::kData, "ragged stimulus x task matrix");
  }

  OursAggregate out;
  double sum = 0.0;
  bool have_best = false;
  for (std::size_t s = 0; s < stimuli.size(); ++s) {
    const double m = Mean(values[s]);
    out.per_stimulus.emplace_back(stimuli[s], m);
    sum += m;
    if (!have_best || m > out.max || (m == out.max && stimuli[s] < out.best)) {
      out.max = m;
      out.best = stimuli[s];
      have_best = true;
    }
  }
  out.avg = sum / static_cast<double>(stimuli.size());

  double per_task_sum = 0.0;
  for (std::size_t t = 0; t < n_tasks; ++t) {
    double best = values[0][t];
    for (std::size_t s = 1; s < stimuli.size(); ++s) best = std::max(best, values[s][t]);
    per_task_sum += best;
  }
  out.max_per_task = per_task_sum / static_cast<double>(n_tasks);
  return out;
}

OursAggregate AggregateOurs(std::span<const RunResult> results,
                            const std::vector<std::string>& stimuli) {
  RequireSingleGroup(results, "aggregate_ours");
  const auto cells = CollapseSeeds(results);

  std::set<std::string> task_set;
  std::set<std::string> present;
  for (const auto& [key, value] : cells) {
    task_set.insert(key.task);
    if (Classify(key.transform) == Arm::kStimulus) present.insert(key.transform);
  }
  std::vector<std::string> ids = stimuli;
  if (ids.empty()) ids.assign(present.begin(), present.end());
  if (ids.empty()) throw Error(ErrorKind::kData, "results contain no single-stimulus transforms");

  const std::vector<std::string> tasks(task_set.begin(), task_set.end());
  std::vector<std::vector<double>> matrix(ids.size(), std::vector<double>(tasks.size()));
  std::vector<std::string> missing;
  const RunResult& f = results.front();
  for (std::size_t s = 0; s < ids.size(); ++s) {
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      auto it = cells.find({tasks[t], ids[s], f.model, f.temperature, f.shots, f.metric_kind});
      std::optional<double> v;
      if (it != cells.end()) v = it->second.Mean();
      if (v) {
        matrix[s][t] = *v;
      } else {
        missing.push_back("(" + tasks[t] + ", " + ids[s] + ")");
      }
    }
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::kData, "missing (task, stimulus) cells for " + f.model + ": " + list);
  }
  return AggregateOursMatrix(ids, matrix);
}

double RelativeGain(double with_prompt, double vanilla) { return with_prompt - vanilla; }

std::vector<std::pair<std::string, double>> RankStimuli(std::span<const RunResult> results) {
  std::map<std::string, std::vector<double>> by_stimulus;
  for (const auto& [key, value] : CollapseSeeds(results)) {
    if (Classify(key.transform) != Arm::kStimulus) continue;
    if (auto m = value.Mean()) by_stimulus[key.transform].push_back(*m);
  }
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [id, values] : by_stimulus) out.emplace_back(id, Mean(values));
  // by_stimulus iterates in id order, so stable_sort keeps ties in id order.
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return out;
}

std::map<double, TemperaturePoint> TemperatureSweep(std::span<const RunResult> results) {
  if (results.empty()) throw Error(ErrorKind::kData, "temperature sweep of an empty result list");
  std::map<double, std::vector<RunResult>> by_temperature;
  for (const RunResult& r : results) {
    if (r.shots != results.front().shots || r.metric_kind != results.front().metric_kind) {
      throw Error(ErrorKind::kData, "temperature sweep mixes shots or metrics");
    }
    by_temperature[r.temperature].push_back(r);
  }
  std::map<double, TemperaturePoint> out;
  for (const auto& [temperature, group] : by_temperature) {
    std::vector<double> vanilla;
    std::map<std::string, std::vector<RunResult>> stimulus_by_model;
    for (const auto& [key, value] : CollapseSeeds(group)) {
      if (key.transform == "vanilla") {
        if (auto m = value.Mean()) vanilla.push_back(*m);
      }
    }
    for (const RunResult& r : group) {
      if (Classify(r.transform_id) == Arm::kStimulus) stimulus_by_model[r.model].push_back(r);
    }
    if (vanilla.empty()) {
      throw Error(ErrorKind::kData,
                  "temperature " + std::to_string(temperature) + " has no vanilla results");
    }
    if (stimulus_by_model.empty()) {
      throw Error(ErrorKind::kData,
                  "temperature " + std::to_string(temperature) + " has no stimulus results");
    }
    std::vector<double> emotion;
    for (const auto& [model, rs] : stimulus_by_model) emotion.push_back(AggregateOurs(rs).avg);
    TemperaturePoint p;
    p.vanilla = Mean(vanilla);
    p.emotion = Mean(emotion);
    p.gap = p.emotion - p.vanilla;
    out[temperature] = p;
  }
  return out;
}

CombinationTable CombinationGrid(std::span<const RunResult> results,
                                 const std::vector<std::string>& catalog) {
  RequireSingleGroup(results, "combination_grid");
  const auto cells = CollapseSeeds(results);
  CombinationTable table;
  std::set<std::string> tasks;
  std::map<std::string, std::vector<double>> singles;
  std::map<std::string, std::map<std::string, double>> combos;
  for (const auto& [key, value] : cells) {
    tasks.insert(key.task);
    const auto mean = value.Mean();
    switch (Classify(key.transform)) {
      case Arm::kStimulus:
        if (mean) singles[key.task].push_back(*mean);
        break;
      case Arm::kCombination:
        if (mean) combos[key.transform][key.task] = *mean;
        break;
      default:
        break;
    }
  }
  table.tasks.assign(tasks.begin(), tasks.end());
  for (const auto& [task, values] : singles) table.ep_avg[task] = Mean(values);

  std::vector<std::string> ids = catalog;
  if (ids.empty()) {
    for (const auto& [id, values] : combos) ids.push_back(id);
  }
  for (const std::string& id : ids) {
    CombinationRow row;
    row.combination = id;
    auto it = combos.find(id);
    for (const std::string& task : table.tasks) {
      if (it == combos.end() || it->second.count(task) == 0) {
        table.warnings.push_back("combination " + id + " has no value for task " + task);
        continue;
      }
      const double v = it->second.at(task);
      row.values[task] = v;
      auto avg = table.ep_avg.find(task);
      if (avg == table.ep_avg.end()) {
        table.warnings.push_back("task " + task + " has no single-stimulus results to compare " + id);
        continue;
      }
      row.improved[task] = v > avg->second;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string_view ToString(GainArm arm) {
  return arm == GainArm::kOursMax ? "ours_max" : "ours_avg";
}

GainArm ParseGainArm(std::string_view text) {
  if (text == "ours_max") return GainArm::kOursMax;
  if (text == "ours_avg") return GainArm::kOursAvg;
  throw ValidationError("", "gain-arm", "expected ours_max or ours_avg, got '" + std::string(text) + "'");
}

AggregateReport BuildReport(std::span<const RunResult> results, const ReportOptions& options) {
  if (results.empty()) throw Error(ErrorKind::kData, "no results to aggregate");
  AggregateReport report;
  report.gain_arm = options.gain_arm;
  report.gain_definition = std::string(ToString(options.gain_arm)) + " - original";

  std::vector<RunResult> scaled(results.begin(), results.end());
  for (RunResult& r : scaled) {
    if (r.value) r.value = Scaled(r.metric_kind, *r.value);
  }

  using SettingKey = std::tuple<std::size_t, double, MetricKind>;
  std::map<SettingKey, std::vector<RunResult>> settings;
  for (const RunResult& r : scaled) settings[{r.shots, r.temperature, r.metric_kind}].push_back(r);

  for (const auto& [key, group] : settings) {
    SettingReport setting;
    std::tie(setting.shots, setting.temperature, setting.metric) = key;
    const auto cells = CollapseSeeds(group);

    std::set<std::string> task_set;
    std::vector<std::string> models;
    std::set<std::int64_t> seeds;
    for (const RunResult& r : group) {
      task_set.insert(r.task_id);
      seeds.insert(r.seed);
      if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    }
    setting.tasks.assign(task_set.begin(), task_set.end());

    for (const std::string& model : models) {
      std::vector<RunResult> mine;
      std::set<std::string> others;
      bool has_stimulus = false;
      bool has_combination = false;
      for (const RunResult& r : group) {
        if (r.model != model) continue;
        mine.push_back(r);
        switch (Classify(r.transform_id)) {
          case Arm::kStimulus: has_stimulus = true; break;
          case Arm::kCombination: has_combination = true; break;
          case Arm::kOther: others.insert(r.transform_id); break;
          default: break;
        }
      }
      ModelSummary summary;
      std::vector<std::string> coverage;
      summary.original = ArmMean(cells, "vanilla", model, setting.tasks, &coverage);
      summary.cot = ArmMean(cells, "cot", model, setting.tasks, &coverage);
      for (const std::string& id : others) {
        if (auto v = ArmMean(cells, id, model, setting.tasks, &coverage)) summary.alternates[id] = *v;
      }
      for (const std::string& c : coverage) report.warnings.push_back(c);

      if (has_stimulus) {
        std::vector<RunResult> stimulus_only;
        for (const RunResult& r : mine) {
          if (Classify(r.transform_id) == Arm::kStimulus) stimulus_only.push_back(r);
        }
        const OursAggregate ours = AggregateOurs(stimulus_only);
        summary.ours_avg = ours.avg;
        summary.ours_max = ours.max;
        summary.ours_max_per_task = ours.max_per_task;
        summary.best_stimulus = ours.best;
        const double arm = options.gain_arm == GainArm::kOursMax ? ours.max : ours.avg;
        if (summary.original) summary.relative_gain = RelativeGain(arm, *summary.original);

        summary.n_seeds = seeds.size();
        if (seeds.size() > 1) {
          std::vector<double> original, avg, max;
          for (std::int64_t seed : seeds) {
            std::vector<RunResult> per_seed;
            std::vector<double> vanilla;
            for (const RunResult& r : stimulus_only) {
              if (r.seed == seed) per_seed.push_back(r);
            }
            for (const RunResult& r : mine) {
              if (r.seed == seed && r.transform_id == "vanilla" && r.value) vanilla.push_back(*r.value);
            }
            if (per_seed.empty()) continue;
            const OursAggregate a = AggregateOurs(per_seed);
            avg.push_back(a.avg);
            max.push_back(a.max);
            if (!vanilla.empty()) original.push_back(Mean(vanilla));
          }
          if (avg.size() > 1) {
            summary.seed_stderr["ours_avg"] = StdErr(avg);
            summary.seed_stderr["ours_max"] = StdErr(max);
          }
          if (original.size() > 1) summary.seed_stderr["original"] = StdErr(original);
        }
      }
      if (has_combination) setting.combinations.emplace_back(model, CombinationGrid(mine));
      setting.per_model.emplace_back(model, std::move(summary));
    }
    setting.per_stimulus_ranking = RankStimuli(group);
    report.settings.push_back(std::move(setting));
  }

  std::map<std::pair<std::size_t, MetricKind>, std::vector<RunResult>> sweeps;
  for (const RunResult& r : scaled) sweeps[{r.shots, r.metric_kind}].push_back(r);
  for (const auto& [key, group] : sweeps) {
    std::set<double> temperatures;
    for (const RunResult& r : group) temperatures.insert(r.temperature);
    if (temperatures.size() < 2) continue;
    try {
      report.temperature_sweeps.emplace_back(key, TemperatureSweep(group));
    } catch (const Error& e) {
      report.warnings.push_back(std::string("temperature sweep skipped: ") + e.what());
    }
  }
  return report;
}

namespace {

Json Optional(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json RankingToJson(const std::vector<std::pair<std::string, double>>& ranking) {
  Json out = Json::array();
  for (const auto& [id, mean] : ranking) out.push_back({{"stimulus", id}, {"mean", mean}});
  return out;
}

}  // namespace

Json AggregateReportToJson(const AggregateReport& report) {
  Json j;
  j["gain_arm"] = ToString(report.gain_arm);
  j["gain_definition"] = report.gain_definition;
  j["settings"] = Json::array();
  for (const SettingReport& s : report.settings) {
    Json setting = {{"shots", s.shots},
                    {"temperature", s.temperature},
                    {"metric_kind", ToString(s.metric)},
                    {"scale", s.metric == MetricKind::kNormalizedPreferred ? "normalized" : "percent"},
                    {"tasks", s.tasks}};
    Json per_model = Json::array();
    for (const auto& [model, m] : s.per_model) {
      Json entry = {{"model", model},
                    {"original", Optional(m.original)},
                    {"cot", Optional(m.cot)},
                    {"ours_avg", Optional(m.ours_avg)},
                    {"ours_max", Optional(m.ours_max)},
                    {"ours_max_per_task", Optional(m.ours_max_per_task)},
                    {"best_stimulus", m.best_stimulus.empty() ? Json(nullptr) : Json(m.best_stimulus)},
                    {"relative_gain", Optional(m.relative_gain)},
                    {"alternates", m.alternates},
                    {"n_seeds", m.n_seeds}};
      if (!m.seed_stderr.empty()) entry["seed_stderr"] = m.seed_stderr;
      per_model.push_back(std::move(entry));
    }
    setting["per_model"] = std::move(per_model);
    setting["per_stimulus_ranking"] = RankingToJson(s.per_stimulus_ranking);
    if (!s.combinations.empty()) {
      Json combos = Json::array();
      for (const auto& [model, table] : s.combinations) {
        Json rows = Json::array();
        for (const CombinationRow& row : table.rows) {
          rows.push_back({{"combination", row.combination},
                          {"values", row.values},
                          {"improved", row.improved}});
        }
        combos.push_back({{"model", model},
                          {"tasks", table.tasks},
                          {"ep_avg", table.ep_avg},
                          {"rows", std::move(rows)},
                          {"warnings", table.warnings}});
      }
      setting["combinations"] = std::move(combos);
    }
    j["settings"].push_back(std::move(setting));
  }
  j["temperature_sweeps"] = Json::array();
  for (const auto& [key, sweep] : report.temperature_sweeps) {
    Json points = Json::array();
    for (const auto& [t, p] : sweep) {
      points.push_back({{"temperature", t}, {"vanilla", p.vanilla}, {"emotion", p.emotion}, {"gap", p.gap}});
    }
    j["temperature_sweeps"].push_back(
        {{"shots", key.first}, {"metric_kind", ToString(key.second)}, {"points", std::move(points)}});
  }
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace emostim
