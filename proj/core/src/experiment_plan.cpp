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

#include "emostim/experiment_plan.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "emostim/error.hpp"

namespace emostim {

namespace {

std::vector<std::string> StringList(const JsonFields& f, std::string_view key) {
  const Json& value = f.Require(key);
  if (value.is_string()) {
    // "a,b,c" is accepted as a shorthand for ["a","b","c"].
    std::vector<std::string> out;
    std::stringstream in(value.get<std::string>());
    std::string part;
    while (std::getline(in, part, ',')) {
      if (!part.empty()) out.push_back(part);
    }
    return out;
  }
  return f.RequireStringArray(key);
}

IoFormat IoFormatFromJson(const Json& json, const std::string& source) {
  JsonFields f(json, source, "io_format");
  IoFormat format;
  format.input_label = f.OptionalString("input_label").value_or(format.input_label);
  format.output_label = f.OptionalString("output_label").value_or(format.output_label);
  format.separator = f.OptionalString("separator").value_or(format.separator);
  format.block_separator = f.OptionalString("block_separator").value_or(format.block_separator);
  return format;
}

}  // namespace

void ValidatePlan(const ExperimentPlan& plan) {
  if (plan.tasks.empty()) throw ValidationError("", "tasks", "plan lists no tasks");
  if (plan.transforms.empty()) throw ValidationError("", "transforms", "plan lists no transforms");
  if (plan.models.empty()) throw ValidationError("", "models", "plan lists no models");
  if (plan.temperatures.empty()) {
    throw ValidationError("", "temperatures", "plan lists no temperatures");
  }
  if (plan.seeds.empty()) throw ValidationError("", "seeds", "plan lists no seeds");
  if (plan.parallelism < 1) throw ValidationError("", "parallelism", "must be at least 1");
  if (plan.sample_limit && *plan.sample_limit == 0) {
    throw ValidationError("", "sample_limit", "must be at least 1 when given");
  }
  for (double t : plan.temperatures) {
    if (!std::isfinite(t) || t < 0.0) {
      throw ValidationError("", "temperatures", "temperature must be finite and >= 0");
    }
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < plan.transforms.size(); ++i) {
    const Transform& t = plan.transforms[i];
    try {
      ValidateTransform(t);
    } catch (const ValidationError& e) {
      throw ValidationError(e.file(), "transforms[" + std::to_string(i) + "]", e.reason());
    }
    if (!ids.insert(t.Id()).second) {
      throw ValidationError("", "transforms", "transform '" + t.Id() + "' listed twice");
    }
  }
  std::set<std::string> names;
  for (const ModelSpec& m : plan.models) {
    if (!names.insert(m.name).second) {
      throw ValidationError("", "models", "model '" + m.name + "' listed twice");
    }
    // A uniform-choice mock without its own seed takes the cell seed.
    if (m.backend != Backend::kMockUniformChoice || m.params.seed) ValidateModelSpec(m);
  }
  if (plan.judge) ValidateModelSpec(*plan.judge);
}

std::vector<Transform> ExpandTransforms(std::span<const std::string> specs) {
  std::vector<Transform> out;
  for (const std::string& spec : specs) {
    if (spec == "stimuli") {
      for (const std::string& id : StimulusLibrary::Builtin().Ids()) {
        out.push_back(Transform::Stimuli({id}));
      }
    } else if (spec == "combinations") {
      for (Transform& t : DefaultCombinationCatalog()) out.push_back(std::move(t));
    } else {
      out.push_back(ParseTransform(spec));
    }
  }
  return out;
}

AlternatePrompts AlternatePromptsFromJson(const Json& json, const std::string& source) {
  if (!json.is_object()) {
    throw ValidationError(source, "alternate_prompts", "expected {family: {task_id: prompt}}");
  }
  AlternatePrompts out;
  for (const auto& [family, tasks] : json.items()) {
    if (!tasks.is_object()) {
      throw ValidationError(source, "alternate_prompts." + family, "expected {task_id: prompt}");
    }
    for (const auto& [task, prompt] : tasks.items()) {
      if (!prompt.is_string() || prompt.get<std::string>().empty()) {
        throw ValidationError(source, "alternate_prompts." + family + "." + task,
                              "expected a non-empty prompt string");
      }
      out[family][task] = prompt.get<std::string>();
    }
  }
  return out;
}

AlternatePrompts LoadAlternatePrompts(const std::filesystem::path& path) {
  return AlternatePromptsFromJson(ReadJsonFile(path), path.string());
}

ExperimentPlan PlanFromJson(const Json& json, const std::string& source,
                            const std::filesystem::path& base_dir,
                            const std::optional<std::string>& default_base_url) {
  if (!json.is_object()) throw ValidationError(source, "", "plan must be a JSON object");
  JsonFields f(json, source);
  ExperimentPlan plan;
  plan.tasks = StringList(f, "tasks");

  const Json& transforms = f.RequireArray("transforms");
  for (std::size_t i = 0; i < transforms.size(); ++i) {
    const Json& t = transforms[i];
    try {
      if (t.is_string()) {
        const std::string spec = t.get<std::string>();
        for (Transform& x : ExpandTransforms(std::span<const std::string>(&spec, 1))) {
          plan.transforms.push_back(std::move(x));
        }
      } else {
        plan.transforms.push_back(TransformFromJson(t, source));
      }
    } catch (const ValidationError& e) {
      if (!e.file().empty()) throw;
      throw ValidationError(source, "transforms[" + std::to_string(i) + "]", e.reason());
    }
  }

  const Json& models = f.RequireArray("models");
  for (std::size_t i = 0; i < models.size(); ++i) {
    try {
      plan.models.push_back(ModelSpecFromJson(models[i], source, default_base_url));
    } catch (const ValidationError& e) {
      if (!e.file().empty()) throw;
      throw ValidationError(source, "models[" + std::to_string(i) + "]", e.reason());
    }
  }

  if (auto shots = f.OptionalInteger("shots")) {
    if (*shots < 0) f.Fail("shots", "must be >= 0");
    plan.shots = static_cast<std::size_t>(*shots);
  }
  if (f.Has("temperatures")) {
    plan.temperatures.clear();
    for (const Json& t : f.RequireArray("temperatures")) {
      if (!t.is_number()) f.Fail("temperatures", "expected numbers");
      plan.temperatures.push_back(t.get<double>());
    }
  }
  if (f.Has("seeds")) {
    plan.seeds.clear();
    for (const Json& s : f.RequireArray("seeds")) {
      if (!s.is_number_integer()) f.Fail("seeds", "expected integers");
      plan.seeds.push_back(s.get<std::int64_t>());
    }
  }
  if (auto limit = f.OptionalInteger("sample_limit")) {
    if (*limit < 1) f.Fail("sample_limit", "must be >= 1");
    plan.sample_limit = static_cast<std::size_t>(*limit);
  }
  if (auto parallelism = f.OptionalInteger("parallelism")) {
    if (*parallelism < 1) f.Fail("parallelism", "must be >= 1");
    plan.parallelism = static_cast<std::size_t>(*parallelism);
  }
  if (f.Has("judge") && !f.Require("judge").is_null()) {
    plan.judge = ModelSpecFromJson(f.Require("judge"), source, default_base_url);
  }
  if (auto dir = f.OptionalString("judge_templates")) {
    std::filesystem::path p(*dir);
    plan.judge_templates_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }
  if (f.Has("alternate_prompts")) {
    const Json& alt = f.Require("alternate_prompts");
    if (alt.is_string()) {
      std::filesystem::path p(alt.get<std::string>());
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      plan.alternate_prompts = LoadAlternatePrompts(p);
    } else {
      plan.alternate_prompts = AlternatePromptsFromJson(alt, source);
    }
  }
  if (f.Has("io_format")) plan.io_format = IoFormatFromJson(f.Require("io_format"), source);

  try {
    ValidatePlan(plan);
  } catch (const ValidationError& e) {
    if (!e.file().empty()) throw;
    throw ValidationError(source, e.field(), e.reason());
  }
  return plan;
}

ExperimentPlan LoadPlan(const std::filesystem::path& path,
                        const std::optional<std::string>& default_base_url) {
  return PlanFromJson(ReadJsonFile(path), path.string(), path.parent_path(), default_base_url);
}

Json PlanToJson(const ExperimentPlan& plan) {
  Json j;
  j["tasks"] = plan.tasks;
  j["transforms"] = Json::array();
  for (const Transform& t : plan.transforms) j["transforms"].push_back(TransformToJson(t));
  j["models"] = Json::array();
  for (const ModelSpec& m : plan.models) j["models"].push_back(ModelSpecToJson(m));
  j["shots"] = plan.shots;
  j["temperatures"] = plan.temperatures;
  j["seeds"] = plan.seeds;
  if (plan.sample_limit) j["sample_limit"] = *plan.sample_limit;
  j["parallelism"] = plan.parallelism;
  if (plan.judge) j["judge"] = ModelSpecToJson(*plan.judge);
  if (plan.judge_templates_dir) j["judge_templates"] = plan.judge_templates_dir->string();
  if (!plan.alternate_prompts.empty()) j["alternate_prompts"] = plan.alternate_prompts;
  j["io_format"] = {{"input_label", plan.io_format.input_label},
                    {"output_label", plan.io_format.output_label},
                    {"separator", plan.io_format.separator},
                    {"block_separator", plan.io_format.block_separator}};
  return j;
}

std::string_view ToString(MetricKind kind) {
  switch (kind) {
    case MetricKind::kAccuracy: return "accuracy";
    case MetricKind::kNormalizedPreferred: return "normalized_preferred";
    case MetricKind::kPctTrue: return "pct_true";
    case MetricKind::kPctInfo: return "pct_info";
  }
  return "accuracy";
}

MetricKind ParseMetricKind(std::string_view text) {
  for (MetricKind k : {MetricKind::kAccuracy, MetricKind::kNormalizedPreferred,
                       MetricKind::kPctTrue, MetricKind::kPctInfo}) {
    if (ToString(k) == text) return k;
  }
  throw ValidationError("", "metric_kind", "unknown metric kind '" + std::string(text) + "'");
}

Json RunResultToJson(const RunResult& r) {
  Json j = {{"task_id", r.task_id},
            {"transform_id", r.transform_id},
            {"model", r.model},
            {"temperature", r.temperature},
            {"shots", r.shots},
            {"seed", r.seed},
            {"metric_kind", ToString(r.metric_kind)},
            {"n_samples", r.n_samples},
            {"n_failed", r.n_failed},
            {"n_flagged", r.n_flagged}};
  j["value"] = r.value ? Json(*r.value) : Json(nullptr);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

RunResult RunResultFromJson(const Json& json, const std::string& source) {
  if (!json.is_object()) throw ValidationError(source, "", "result must be a JSON object");
  JsonFields f(json, source);
  RunResult r;
  r.task_id = f.RequireNonEmptyString("task_id");
  r.transform_id = f.RequireNonEmptyString("transform_id");
  r.model = f.RequireNonEmptyString("model");
  const auto temperature = f.OptionalNumber("temperature");
  if (!temperature) f.Fail("temperature", "missing number");
  r.temperature = *temperature;
  auto count = [&](std::string_view key, bool required) -> std::size_t {
    const auto v = f.OptionalInteger(key);
    if (!v) {
      if (required) f.Fail(key, "missing integer");
      return 0;
    }
    if (*v < 0) f.Fail(key, "must be >= 0");
    return static_cast<std::size_t>(*v);
  };
  r.shots = count("shots", true);
  const auto seed = f.OptionalInteger("seed");
  if (!seed) f.Fail("seed", "missing integer");
  r.seed = *seed;
  try {
    r.metric_kind = ParseMetricKind(f.RequireString("metric_kind"));
  } catch (const ValidationError& e) {
    if (!e.file().empty()) throw;
    f.Fail("metric_kind", e.reason());
  }
  if (f.Has("value") && !f.Require("value").is_null()) {
    const auto value = f.OptionalNumber("value");
    if (!value || !std::isfinite(*value)) f.Fail("value", "must be a finite number or null");
    r.value = *value;
  }
  r.n_samples = count("n_samples", true);
  r.n_failed = count("n_failed", false);
  r.n_flagged = count("n_flagged", false);
  r.error = f.OptionalString("error").value_or("");
  if (r.value && r.metric_kind != MetricKind::kNormalizedPreferred &&
      (*r.value < 0.0 || *r.value > 1.0)) {
    f.Fail("value", std::string(ToString(r.metric_kind)) + " values must lie in [0, 1]");
  }
  if (r.value && r.n_samples == 0) f.Fail("n_samples", "a cell with a value needs n_samples >= 1");
  return r;
}

std::string ResultsToJsonl(std::span<const RunResult> results) {
  std::string out;
  for (const RunResult& r : results) {
    out += RunResultToJson(r).dump(-1, ' ', false, Json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<RunResult> ParseResultsJsonl(std::string_view text, const std::string& source) {
  std::vector<RunResult> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ValidationError(where, "", std::string("malformed results line: ") + e.what());
    }
    out.push_back(RunResultFromJson(j, where));
  }
  return out;
}

std::vector<RunResult> ReadResultsJsonl(const std::filesystem::path& path) {
  return ParseResultsJsonl(ReadTextFile(path), path.string());
}

}  // namespace emostim
