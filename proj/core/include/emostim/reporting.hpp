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
#include <vector>

#include "emostim/aggregation.hpp"
#include "emostim/json_io.hpp"

namespace emostim {

/// Rows are arms, columns are models (usually followed by "Average").
/// A missing cell is rendered as "-" and takes no part in emphasis.
struct TableSpec {
  std::string title;
  std::vector<std::string> rows;
  std::vector<std::string> columns;
  std::vector<std::vector<std::optional<double>>> cells;  // [row][column]
};

enum class TableFormat { kMarkdown, kCsv };

TableFormat ParseTableFormat(std::string_view text);

enum class Emphasis { kNone, kBest, kSecond };

/// Per column, computed on the two-decimal rendered values: every cell equal
/// to the maximum is best; when exactly one cell is best, the cells equal to
/// the next distinct value are second.
std::vector<std::vector<Emphasis>> ColumnEmphasis(const TableSpec& table);

/// Throws ValidationError on a ragged grid. Markdown marks best in **bold**
/// and second best in _italics_, with a legend line.
std::string EmitTable(const TableSpec& table, TableFormat format);

/// Parses the CSV written by EmitTable back into a table (numeric cells only).
TableSpec ParseCsvTable(std::string_view csv);

/// Table-1-style grid for one setting: Original, +Zero-shot-CoT, alternates,
/// +Ours(avg), +Ours(max) rows; one column per model plus Average. Arms that
/// no model ran are left out.
TableSpec TableFromSetting(const SettingReport& setting);

enum class PlotKind { kStimulusBars, kTemperatureCurves, kRelativeGainBars, kAttributionHeatmap };

std::string_view ToString(PlotKind kind);
PlotKind ParsePlotKind(std::string_view text);

struct PlotSeries {
  std::string label;
  std::vector<Json> x;  // strings or numbers
  std::vector<double> y;
};

struct PlotData {
  PlotKind kind = PlotKind::kStimulusBars;
  std::vector<PlotSeries> series;
  Json meta = Json::object();
};

Json PlotDataToJson(const PlotData& plot);

/// Throws when a series has mismatched x/y lengths or the plot is empty.
void ValidatePlotData(const PlotData& plot);

/// stimulus_bars: one bar per ranked stimulus of the first setting.
/// temperature_curves: vanilla and emotionprompt series over temperatures.
/// relative_gain_bars: one bar per model. Throws when the report lacks the
/// data the kind needs.
PlotData MakePlotData(const AggregateReport& report, PlotKind kind);

/// Writes every plot the report supports as `<dir>/<kind>.json` and returns
/// the paths written.
std::vector<std::filesystem::path> WritePlots(const AggregateReport& report,
                                              const std::filesystem::path& dir);

/// Fixed two-decimal formatting used by all tables.
std::string FormatFixed2(double value);

}  // namespace emostim
