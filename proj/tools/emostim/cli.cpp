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

#include "emostim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "emostim/aggregation.hpp"
#include "emostim/attribution_report.hpp"
#include "emostim/config.hpp"
#include "emostim/error.hpp"
#include "emostim/experiment_plan.hpp"
#include "emostim/model_client.hpp"
#include "emostim/reporting.hpp"
#include "emostim/response_cache.hpp"
#include "emostim/runner.hpp"
#include "emostim/task_corpus.hpp"

namespace emostim {

namespace fs = std::filesystem;

std::atomic<bool>& CancelFlag() {
  static std::atomic<bool> flag{false};
  return flag;
}

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string cache_dir;
  bool no_cache = false;
  std::string base_url;
  double rate_limit = -1.0;
};

struct RunFlags {
  std::string plan;
  std::string corpus;
  std::vector<std::string> question_packs;
  std::vector<std::string> tasks;
  std::vector<std::string> transforms;
  std::vector<std::string> models;
  std::size_t shots = 0;
  std::vector<double> temperatures;
  std::vector<std::int64_t> seeds;
  std::size_t limit = 0;
  std::size_t parallelism = 0;
  std::string judge;
  std::string judge_templates;
  std::string alternate_prompts;
  std::string out;
  std::string scores;
  bool strict = false;
};

struct ReportFlags {
  std::string results;
  std::string gain_arm = "ours_max";
  std::string table = "markdown";
  std::string plots;
  std::string out;
};

// Writes to `path` atomically, or to `out` when no path is given.
void Emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    out.flush();
  } else {
    WriteFileAtomically(path, text);
  }
}

Config ResolveConfig(const GlobalFlags& g) {
  const bool explicit_path = !g.config_path.empty();
  Config config = LoadConfig(explicit_path ? fs::path(g.config_path) : DefaultConfigPath(), explicit_path);
  if (!g.cache_dir.empty()) config.cache_dir = g.cache_dir;
  if (!g.base_url.empty()) config.base_url = g.base_url;
  if (g.rate_limit >= 0.0) config.rate_limit_rpm = g.rate_limit;
  return config;
}

ClientOptions MakeClientOptions(const Config& config, const GlobalFlags& g) {
  ClientOptions options;
  if (!g.no_cache) options.cache_dir = config.cache_dir;
  options.rate_limit_rpm = config.rate_limit_rpm;
  options.api_key_env = config.api_key_env;
  return options;
}

// ---------------------------------------------------------------- tasks

std::vector<fs::path> TaskFiles(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError(path.string(), "", "path does not exist");
  std::vector<fs::path> files;
  if (!fs::is_directory(path)) return {path};
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

int CmdTasksValidate(const std::string& path, std::ostream& out, std::ostream& err) {
  const auto files = TaskFiles(path);
  if (files.empty()) {
    err << "warning: no task files found in " << path << "\n";
    return kExitOk;
  }
  std::map<std::string, std::string> seen;
  std::size_t bad = 0;
  for (const fs::path& file : files) {
    try {
      const TaskSpec task = LoadTaskFile(file);
      auto [it, inserted] = seen.emplace(task.id, file.string());
      if (!inserted) {
        throw ValidationError(file.string(), "id",
                              "duplicate task id '" + task.id + "' (also in " + it->second + ")");
      }
      out << "ok      " << file.string() << " (" << task.id << ", " << task.samples.size()
          << " samples)\n";
    } catch (const ValidationError& e) {
      ++bad;
      out << "invalid " << e.what() << "\n";
    }
  }
  out << files.size() - bad << " of " << files.size() << " task files valid\n";
  return bad == 0 ? kExitOk : kExitData;
}

int CmdTasksList(const std::string& path, std::ostream& out, std::ostream& err) {
  const TaskSet set = LoadTaskSet(path);
  for (const auto& w : set.warnings()) err << "warning: " << w << "\n";
  std::size_t width = 2;
  for (const TaskSpec& t : set.tasks()) width = std::max(width, t.id.size());
  out << std::left << std::setw(static_cast<int>(width)) << "id" << "  " << std::setw(15) << "kind"
      << "  " << std::setw(11) << "match_mode" << "  samples\n";
  for (const TaskSpec& t : set.tasks()) {
    out << std::left << std::setw(static_cast<int>(width)) << t.id << "  " << std::setw(15)
        << ToString(t.kind) << "  " << std::setw(11) << ToString(t.match_mode) << "  "
        << t.samples.size() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- run

TaskSet LoadCorpus(const std::string& corpus, const std::vector<std::string>& packs) {
  std::vector<TaskSpec> tasks;
  std::vector<std::string> warnings;
  if (!corpus.empty()) {
    TaskSet set = LoadTaskSet(corpus);
    tasks = set.tasks();
    warnings = set.warnings();
  }
  for (const std::string& pack : packs) {
    tasks.push_back(QuestionPackToTask(LoadQuestionPack(pack), "Answer the following question."));
  }
  if (tasks.empty()) throw ValidationError("", "corpus", "no tasks: pass --corpus and/or --question-pack");
  return TaskSet(std::move(tasks), std::move(warnings));
}

int CmdRun(const GlobalFlags& g, RunFlags f, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
  const Config config = ResolveConfig(g);
  ExperimentPlan plan;
  if (!f.plan.empty()) {
    plan = LoadPlan(f.plan, config.base_url);
    if (f.corpus.empty()) {
      const Json raw = ReadJsonFile(f.plan);
      if (raw.contains("corpus") && raw.at("corpus").is_string()) {
        fs::path p = raw.at("corpus").get<std::string>();
        if (p.is_relative()) p = fs::path(f.plan).parent_path() / p;
        f.corpus = p.string();
      }
    }
  } else {
    plan.tasks = {"*"};
    plan.parallelism = config.parallelism;
    if (f.transforms.empty()) f.transforms = {"vanilla"};
    if (f.models.empty()) throw ConfigError("pass --models or --plan");
  }
  if (cmd.count("--tasks") > 0) plan.tasks = f.tasks;
  if (!f.transforms.empty() && (f.plan.empty() || cmd.count("--transforms") > 0)) {
    plan.transforms = ExpandTransforms(f.transforms);
  }
  if (cmd.count("--models") > 0) {
    plan.models.clear();
    for (const std::string& m : f.models) plan.models.push_back(ParseModelSpec(m, config.base_url));
  }
  if (cmd.count("--shots") > 0) plan.shots = f.shots;
  if (cmd.count("--temperature") > 0) plan.temperatures = f.temperatures;
  if (cmd.count("--seed") > 0) plan.seeds = f.seeds;
  if (cmd.count("--limit") > 0) plan.sample_limit = f.limit;
  if (cmd.count("--parallelism") > 0) plan.parallelism = f.parallelism;
  if (cmd.count("--judge") > 0) plan.judge = ParseModelSpec(f.judge, config.base_url);
  if (cmd.count("--judge-templates") > 0) plan.judge_templates_dir = f.judge_templates;
  if (cmd.count("--alternate-prompts") > 0) plan.alternate_prompts = LoadAlternatePrompts(f.alternate_prompts);
  ValidatePlan(plan);

  const TaskSet corpus = LoadCorpus(f.corpus, f.question_packs);
  for (const auto& w : corpus.warnings()) err << "warning: " << w << "\n";

  ModelClient client(MakeClientOptions(config, g));
  RunOptions options;
  options.cancel = &CancelFlag();
  std::size_t last_decile = 0;
  options.progress = [&](const RunProgress& p) {
    const std::size_t decile = p.total == 0 ? 10 : (10 * p.completed) / p.total;
    if (decile > last_decile || p.completed == p.total) {
      last_decile = decile;
      err << "progress: " << p.completed << "/" << p.total << " samples, " << p.failed
          << " failed\n";
    }
  };
  const RunOutput result = Run(plan, corpus, client, options);

  Emit(f.out, ResultsToJsonl(result.results), out);
  if (!f.scores.empty()) WriteFileAtomically(f.scores, CellScoresToJsonl(result.scores));

  std::size_t failed_cells = 0;
  std::size_t partial_cells = 0;
  for (const RunResult& r : result.results) {
    if (!r.value) {
      ++failed_cells;
    } else if (r.n_failed > 0) {
      ++partial_cells;
    }
  }
  const ClientCounters counters = client.counters();
  err << result.results.size() << " results (" << failed_cells << " without value, " << partial_cells
      << " with failed samples); " << counters.cache_hits << " cache hits, "
      << counters.network_requests << " network requests\n";
  if (result.cancelled) {
    err << "interrupted: unfinished cells were dropped\n";
    return kExitInterrupted;
  }
  if (!result.results.empty() && failed_cells == result.results.size()) return kExitData;
  if (f.strict && (failed_cells > 0 || partial_cells > 0)) return kExitData;
  return kExitOk;
}

// ---------------------------------------------------------------- aggregate / report

AggregateReport ReportFromResults(const ReportFlags& f) {
  const std::vector<RunResult> results = ReadResultsJsonl(f.results);
  if (results.empty()) throw ValidationError(f.results, "", "results file holds no results");
  ReportOptions options;
  options.gain_arm = ParseGainArm(f.gain_arm);
  return BuildReport(results, options);
}

int CmdAggregate(const ReportFlags& f, std::ostream& out, std::ostream& err) {
  const AggregateReport report = ReportFromResults(f);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  Emit(f.out, AggregateReportToJson(report).dump(2) + "\n", out);
  return kExitOk;
}

int CmdReport(const ReportFlags& f, std::ostream& out, std::ostream& err) {
  const AggregateReport report = ReportFromResults(f);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  const TableFormat format = ParseTableFormat(f.table);
  std::string text;
  for (const SettingReport& setting : report.settings) {
    if (!text.empty()) text += "\n";
    text += EmitTable(TableFromSetting(setting), format);
    if (format == TableFormat::kMarkdown) {
      std::string gains;
      for (const auto& [model, m] : setting.per_model) {
        if (!m.relative_gain) continue;
        gains += (gains.empty() ? "" : ", ") + model + " " + FormatFixed2(*m.relative_gain);
      }
      if (!gains.empty()) text += "\nRelative gain (" + report.gain_definition + "): " + gains + "\n";
    }
  }
  Emit(f.out, text, out);
  if (!f.plots.empty()) {
    for (const fs::path& p : WritePlots(report, f.plots)) err << "wrote " << p.string() << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- cache / attribution

int CmdCacheStats(const GlobalFlags& g, std::ostream& out) {
  const Config config = ResolveConfig(g);
  const ResponseCache cache(config.cache_dir);
  const CacheStats stats = cache.Stats();
  out << "dir: " << config.cache_dir.string() << "\nentries: " << stats.entries
      << "\nbytes: " << stats.bytes << "\n";
  return kExitOk;
}

int CmdCacheClear(const GlobalFlags& g, std::ostream& out) {
  const Config config = ResolveConfig(g);
  const ResponseCache cache(config.cache_dir);
  out << "removed " << cache.Clear() << " entries from " << config.cache_dir.string() << "\n";
  return kExitOk;
}

int CmdAttributionRender(const std::string& file, const std::string& out_path,
                         const std::string& plot_path, std::ostream& out) {
  const AttributionRendering rendering = RenderAttribution(LoadAttribution(file));
  Emit(out_path, rendering.markdown, out);
  if (!plot_path.empty()) {
    if (rendering.heatmap.series.empty()) {
      throw ValidationError(file, "per_variant", "no tokens to plot");
    }
    WriteFileAtomically(plot_path, PlotDataToJson(rendering.heatmap).dump(2) + "\n");
  }
  return kExitOk;
}

int ExitCodeFor(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kData: return kExitData;
    case ErrorKind::kConfig: return kExitConfig;
    case ErrorKind::kNetwork: return kExitNetwork;
  }
  return kExitData;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotional-stimulus prompt evaluation harness", "emostim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "emostim 0.1.0");

  GlobalFlags g;
  app.add_option("--config", g.config_path, "Config file (JSON); default under $XDG_CONFIG_HOME");
  app.add_option("--cache-dir", g.cache_dir, "Response cache directory");
  app.add_flag("--no-cache", g.no_cache, "Do not read or write the response cache");
  app.add_option("--base-url", g.base_url, "Default endpoint for http models");
  app.add_option("--rate-limit", g.rate_limit, "Requests per minute per endpoint (0 = unlimited)")
      ->check(CLI::NonNegativeNumber);

  // tasks
  std::string tasks_path;
  auto* tasks = app.add_subcommand("tasks", "Validate or list task files");
  tasks->require_subcommand(1);
  auto* validate = tasks->add_subcommand("validate", "Check every task file against the schema");
  validate->add_option("path", tasks_path, "Task file or directory")->required();
  auto* list = tasks->add_subcommand("list", "Print id, kind and sample count per task");
  list->add_option("path", tasks_path, "Task file or directory")->required();

  // run
  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run an experiment grid and write RunResult JSONL");
  run->add_option("--plan", rf.plan, "Plan file (JSON); other grid flags override its fields");
  run->add_option("--corpus", rf.corpus, "Task file or directory");
  run->add_option("--question-pack", rf.question_packs, "Question pack to run as a judged task");
  run->add_option("--tasks", rf.tasks, "Task ids, comma separated ('*' = all)")->delimiter(',');
  run->add_option("--transforms", rf.transforms,
                  "vanilla, cot, EPxx, EPxx+EPyy, suffix:<text>, <family>[+EPxx][+cot], stimuli, combinations")
      ->delimiter(',');
  run->add_option("--models", rf.models, "mock:oracle, mock:fixed:<t>, mock:uniform_choice[:seed], "
                                         "mock:scripted:<file>, or <name>[@<base_url>]")
      ->delimiter(',');
  run->add_option("--shots", rf.shots, "Demonstrations per prompt (0 = zero-shot)");
  run->add_option("--temperature", rf.temperatures, "Sampling temperatures")->delimiter(',');
  run->add_option("--seed", rf.seeds, "Seeds")->delimiter(',');
  run->add_option("--limit", rf.limit, "Evaluate at most this many samples per task")
      ->check(CLI::PositiveNumber);
  run->add_option("--parallelism", rf.parallelism, "Concurrent requests")->check(CLI::PositiveNumber);
  run->add_option("--judge", rf.judge, "Judge model for judged tasks");
  run->add_option("--judge-templates", rf.judge_templates, "Directory overriding judge templates");
  run->add_option("--alternate-prompts", rf.alternate_prompts,
                  "JSON {family: {task_id: prompt}} with externally generated prompts");
  run->add_option("--out", rf.out, "Results JSONL path (default stdout)");
  run->add_option("--scores", rf.scores, "Also write per-sample ScoreRecord JSONL here");
  run->add_flag("--strict", rf.strict, "Exit 1 if any cell or sample failed");

  // aggregate / report
  ReportFlags af;
  auto* aggregate = app.add_subcommand("aggregate", "Compute the aggregate report as JSON");
  aggregate->add_option("results", af.results, "RunResult JSONL")->required();
  aggregate->add_option("--gain-arm", af.gain_arm, "ours_max (default) or ours_avg");
  aggregate->add_option("--out", af.out, "Output path (default stdout)");

  ReportFlags pf;
  auto* report = app.add_subcommand("report", "Render tables and plot data");
  report->add_option("results", pf.results, "RunResult JSONL")->required();
  report->add_option("--gain-arm", pf.gain_arm, "ours_max (default) or ours_avg");
  report->add_option("--table", pf.table, "markdown (default) or csv");
  report->add_option("--plots", pf.plots, "Directory for plot-data JSON files");
  report->add_option("--out", pf.out, "Table output path (default stdout)");

  // cache
  auto* cache = app.add_subcommand("cache", "Inspect or clear the response cache");
  cache->require_subcommand(1);
  auto* stats = cache->add_subcommand("stats", "Entry count and size");
  auto* clear = cache->add_subcommand("clear", "Delete every cached response");

  // attribution
  std::string attribution_file;
  std::string attribution_out;
  std::string attribution_plot;
  auto* attribution = app.add_subcommand("attribution", "Attribution results");
  attribution->require_subcommand(1);
  auto* render = attribution->add_subcommand("render", "Markdown report and heatmap plot data");
  render->add_option("file", attribution_file, "AttributionResult JSON")->required();
  render->add_option("--out", attribution_out, "Markdown output path (default stdout)");
  render->add_option("--plot", attribution_plot, "Write heatmap plot-data JSON here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*validate) return CmdTasksValidate(tasks_path, out, err);
    if (*list) return CmdTasksList(tasks_path, out, err);
    if (*run) return CmdRun(g, rf, *run, out, err);
    if (*aggregate) return CmdAggregate(af, out, err);
    if (*report) return CmdReport(pf, out, err);
    if (*stats) return CmdCacheStats(g, out);
    if (*clear) return CmdCacheClear(g, out);
    if (*render) return CmdAttributionRender(attribution_file, attribution_out, attribution_plot, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitConfig;
}

}  // namespace emostim
