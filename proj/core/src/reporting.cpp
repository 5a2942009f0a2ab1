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

#include "emostim/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "emostim/error.hpp"

namespace emostim {

namespace {

std::string CsvField(const std::string& text) {
  if (text.find_first_of(",\"\n\r") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> ParseCsv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    any = true;
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (any) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

void CheckGrid(const TableSpec& table) {
  if (table.cells.size() != table.rows.size()) {
    throw ValidationError("", "table", "ragged grid: " + std::to_string(table.rows.size()) +
                                           " row labels, " + std::to_string(table.cells.size()) +
                                           " rows of cells");
  }
  for (std::size_t r = 0; r < table.cells.size(); ++r) {
    if (table.cells[r].size() != table.columns.size()) {
      throw ValidationError("", "table", "ragged grid: row '" + table.rows[r] + "' has " +
                                             std::to_string(table.cells[r].size()) + " cells for " +
                                             std::to_string(table.columns.size()) + " columns");
    }
  }
}

}  // namespace

std::string FormatFixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

TableFormat ParseTableFormat(std::string_view text) {
  if (text == "markdown" || text == "md") return TableFormat::kMarkdown;
  if (text == "csv") return TableFormat::kCsv;
  throw ValidationError("", "table", "expected markdown or csv, got '" + std::string(text) + "'");
}

std::vector<std::vector<Emphasis>> ColumnEmphasis(const TableSpec& table) {
  CheckGrid(table);
  std::vector<std::vector<Emphasis>> out(table.rows.size(),
                                         std::vector<Emphasis>(table.columns.size(), Emphasis::kNone));
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    // Compare what the reader sees, so 55.241 and 55.239 tie.
    std::vector<std::pair<double, std::size_t>> shown;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      if (table.cells[r][c]) shown.emplace_back(std::strtod(FormatFixed2(*table.cells[r][c]).c_str(), nullptr), r);
    }
    if (shown.empty()) continue;
    std::set<double, std::greater<>> distinct;
    for (const auto& [v, r] : shown) distinct.insert(v);
    const double best = *distinct.begin();
    std::size_t n_best = 0;
    for (const auto& [v, r] : shown) {
      if (v == best) {
        out[r][c] = Emphasis::kBest;
        ++n_best;
      }
    }
    if (n_best == 1 && distinct.size() >= 2) {
      const double second = *std::next(distinct.begin());
      for (const auto& [v, r] : shown) {
        if (v == second) out[r][c] = Emphasis::kSecond;
      }
    }
  }
  return out;
}

std::string EmitTable(const TableSpec& table, TableFormat format) {
  CheckGrid(table);
  std::string out;
  if (format == TableFormat::kCsv) {
    out += "arm";
    for (const auto& c : table.columns) out += "," + CsvField(c);
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      out += CsvField(table.rows[r]);
      for (const auto& cell : table.cells[r]) out += "," + (cell ? FormatFixed2(*cell) : std::string());
      out += '\n';
    }
    return out;
  }

  const auto emphasis = ColumnEmphasis(table);
  if (!table.title.empty()) out += "### " + table.title + "\n\n";
  out += "| Method |";
  for (const auto& c : table.columns) out += " " + c + " |";
  out += "\n|---|";
  for (std::size_t c = 0; c < table.columns.size(); ++c) out += "---:|";
  out += '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += "| " + table.rows[r] + " |";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      const auto& cell = table.cells[r][c];
      std::string text = cell ? FormatFixed2(*cell) : "-";
      if (emphasis[r][c] == Emphasis::kBest) text = "**" + text + "**";
      if (emphasis[r][c] == Emphasis::kSecond) text = "_" + text + "_";
      out += " " + text + " |";
    }
    out += '\n';
  }
  out += "\nBest per column in **bold**, second best in _italics_.\n";
  return out;
}

TableSpec ParseCsvTable(std::string_view csv) {
  const auto rows = ParseCsv(csv);
  if (rows.empty()) throw ValidationError("", "csv", "empty table");
  TableSpec table;
  table.columns.assign(rows.front().begin() + 1, rows.front().end());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw ValidationError("", "csv", "line " + std::to_string(i + 1) + " has " +
                                           std::to_string(rows[i].size()) + " fields");
    }
    table.rows.push_back(rows[i].front());
    std::vector<std::optional<double>> cells;
    for (std::size_t c = 1; c < rows[i].size(); ++c) {
      if (rows[i][c].empty()) {
        cells.emplace_back();
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(rows[i][c].c_str(), &end);
      if (end == rows[i][c].c_str() || *end != '\0') {
        throw ValidationError("", "csv", "non-numeric cell '" + rows[i][c] + "'");
      }
      cells.emplace_back(v);
    }
    table.cells.push_back(std::move(cells));
  }
  return table;
}

TableSpec TableFromSetting(const SettingReport& setting) {
  TableSpec table;
  table.title = "shots=" + std::to_string(setting.shots) + ", temperature=" +
                FormatFixed2(setting.temperature) + ", " + std::string(ToString(setting.metric));
  for (const auto& [model, summary] : setting.per_model) table.columns.push_back(model);
  table.columns.push_back("Average");

  std::set<std::string> alternates;
  for (const auto& [model, summary] : setting.per_model) {
    for (const auto& [id, value] : summary.alternates) alternates.insert(id);
  }

  auto add_row = [&](const std::string& label, auto get) {
    std::vector<std::optional<double>> cells;
    bool any = false;
    bool all = true;
    double sum = 0.0;
    for (const auto& [model, summary] : setting.per_model) {
      const std::optional<double> v = get(summary);
      cells.push_back(v);
      if (v) {
        any = true;
        sum += *v;
      } else {
        all = false;
      }
    }
    if (!any) return;
    cells.push_back(all ? std::optional<double>(sum / static_cast<double>(setting.per_model.size()))
                        : std::nullopt);
    table.rows.push_back(label);
    table.cells.push_back(std::move(cells));
  };

  add_row("Original", [](const ModelSummary& s) { return s.original; });
  add_row("+Zero-shot-CoT", [](const ModelSummary& s) { return s.cot; });
  for (const std::string& id : alternates) {
    add_row("+" + id, [&](const ModelSummary& s) -> std::optional<double> {
      auto it = s.alternates.find(id);
      if (it == s.alternates.end()) return std::nullopt;
      return it->second;
    });
  }
  add_row("+Ours(avg)", [](const ModelSummary& s) { return s.ours_avg; });
  add_row("+Ours(max)", [](const ModelSummary& s) { return s.ours_max; });
  return table;
}

std::string_view ToString(PlotKind kind) {
  switch (kind) {
    case PlotKind::kStimulusBars: return "stimulus_bars";
    case PlotKind::kTemperatureCurves: return "temperature_curves";
    case PlotKind::kRelativeGainBars: return "relative_gain_bars";
    case PlotKind::kAttributionHeatmap: return "attribution_heatmap";
  }
  return "stimulus_bars";
}

PlotKind ParsePlotKind(std::string_view text) {
  for (PlotKind k : {PlotKind::kStimulusBars, PlotKind::kTemperatureCurves,
                     PlotKind::kRelativeGainBars, PlotKind::kAttributionHeatmap}) {
    if (ToString(k) == text) return k;
  }
  throw ValidationError("", "plot", "unknown plot kind '" + std::string(text) + "'");
}

void ValidatePlotData(const PlotData& plot) {
  if (plot.series.empty()) {
    throw ValidationError("", std::string(ToString(plot.kind)), "plot has no series");
  }
  for (const PlotSeries& s : plot.series) {
    if (s.x.size() != s.y.size()) {
      throw ValidationError("", std::string(ToString(plot.kind)),
                            "series '" + s.label + "' has " + std::to_string(s.x.size()) +
                                " x values and " + std::to_string(s.y.size()) + " y values");
    }
    if (s.y.empty()) {
      throw ValidationError("", std::string(ToString(plot.kind)), "series '" + s.label + "' is empty");
    }
  }
}

Json PlotDataToJson(const PlotData& plot) {
  ValidatePlotData(plot);
  Json series = Json::array();
  for (const PlotSeries& s : plot.series) {
    series.push_back({{"label", s.label}, {"x", s.x}, {"y", s.y}});
  }
  return {{"kind", ToString(plot.kind)}, {"series", std::move(series)}, {"meta", plot.meta}};
}

namespace {

std::string SettingLabel(const SettingReport& s) {
  return "shots=" + std::to_string(s.shots) + " temperature=" + FormatFixed2(s.temperature) +
         " " + std::string(ToString(s.metric));
}

std::string Unit(MetricKind kind) {
  return kind == MetricKind::kNormalizedPreferred ? "normalized preferred metric" : "percent";
}

}  // namespace

PlotData MakePlotData(const AggregateReport& report, PlotKind kind) {
  PlotData plot;
  plot.kind = kind;
  switch (kind) {
    case PlotKind::kStimulusBars:
      for (const SettingReport& s : report.settings) {
        if (s.per_stimulus_ranking.empty()) continue;
        auto ranking = s.per_stimulus_ranking;
        std::sort(ranking.begin(), ranking.end());
        PlotSeries series;
        series.label = SettingLabel(s);
        for (const auto& [id, mean] : ranking) {
          series.x.emplace_back(id);
          series.y.push_back(mean);
        }
        plot.series.push_back(std::move(series));
        plot.meta = {{"x_label", "stimulus"}, {"y_label", "mean over tasks and models"},
                     {"unit", Unit(s.metric)}};
      }
      break;
    case PlotKind::kTemperatureCurves:
      for (const auto& [key, sweep] : report.temperature_sweeps) {
        PlotSeries vanilla{"vanilla", {}, {}};
        PlotSeries emotion{"emotionprompt", {}, {}};
        for (const auto& [t, p] : sweep) {
          vanilla.x.emplace_back(t);
          vanilla.y.push_back(p.vanilla);
          emotion.x.emplace_back(t);
          emotion.y.push_back(p.emotion);
        }
        plot.series.push_back(std::move(vanilla));
        plot.series.push_back(std::move(emotion));
        plot.meta = {{"x_label", "temperature"}, {"y_label", "mean value"},
                     {"unit", Unit(key.second)}, {"shots", key.first}};
        break;  // one sweep per file
      }
      break;
    case PlotKind::kRelativeGainBars:
      for (const SettingReport& s : report.settings) {
        PlotSeries series;
        series.label = SettingLabel(s);
        for (const auto& [model, m] : s.per_model) {
          if (!m.relative_gain) continue;
          series.x.emplace_back(model);
          series.y.push_back(*m.relative_gain);
        }
        if (!series.y.empty()) plot.series.push_back(std::move(series));
      }
      plot.meta = {{"x_label", "model"}, {"y_label", "relative gain"},
                   {"gain_definition", report.gain_definition}};
      break;
    case PlotKind::kAttributionHeatmap:
      throw ValidationError("", "plot", "attribution heatmaps come from attribution results");
  }
  if (plot.series.empty()) {
    throw ValidationError("", std::string(ToString(kind)), "the results hold no data for this plot");
  }
  ValidatePlotData(plot);
  return plot;
}

std::vector<std::filesystem::path> WritePlots(const AggregateReport& report,
                                              const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (PlotKind kind : {PlotKind::kStimulusBars, PlotKind::kTemperatureCurves,
                        PlotKind::kRelativeGainBars}) {
    PlotData plot;
    try {
      plot = MakePlotData(report, kind);
    } catch (const ValidationError&) {
      continue;
    }
    const auto path = dir / (std::string(ToString(kind)) + ".json");
    WriteFileAtomically(path, PlotDataToJson(plot).dump(2) + "\n");
    written.push_back(path);
  }
  return written;
}

}  // namespace emostim
