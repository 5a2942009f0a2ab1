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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "emostim/error.hpp"
#include "test_util.hpp"

namespace emostim {
namespace {

using testing::TempDir;

TableSpec Column(std::vector<std::optional<double>> values) {
  TableSpec t;
  t.columns = {"Average"};
  for (std::size_t i = 0; i < values.size(); ++i) {
    t.rows.push_back("row" + std::to_string(i));
    t.cells.push_back({values[i]});
  }
  return t;
}

std::vector<Emphasis> Marks(const TableSpec& t) {
  std::vector<Emphasis> out;
  for (const auto& row : ColumnEmphasis(t)) out.push_back(row[0]);
  return out;
}

TEST(EmphasisTest, AverageColumnExample) {
  EXPECT_EQ(Marks(Column({51.65, 46.74, 51.98, 55.24})),
            (std::vector<Emphasis>{Emphasis::kNone, Emphasis::kNone, Emphasis::kSecond, Emphasis::kBest}));
}

TEST(EmphasisTest, SingleRowHasNoSecond) {
  EXPECT_EQ(Marks(Column({3.0})), (std::vector<Emphasis>{Emphasis::kBest}));
}

TEST(EmphasisTest, TiedBestSuppressesSecond) {
  EXPECT_EQ(Marks(Column({5.0, 5.0, 4.0})),
            (std::vector<Emphasis>{Emphasis::kBest, Emphasis::kBest, Emphasis::kNone}));
}

TEST(EmphasisTest, ComparesRenderedValues) {
  EXPECT_EQ(Marks(Column({55.241, 55.239, 1.0})),
            (std::vector<Emphasis>{Emphasis::kBest, Emphasis::kBest, Emphasis::kNone}));
}

TEST(EmphasisTest, MissingCellsAreIgnored) {
  EXPECT_EQ(Marks(Column({std::nullopt, 1.0, 2.0})),
            (std::vector<Emphasis>{Emphasis::kNone, Emphasis::kSecond, Emphasis::kBest}));
  EXPECT_EQ(Marks(Column({std::nullopt})), (std::vector<Emphasis>{Emphasis::kNone}));
}

TEST(EmphasisTest, AgreesWithIndependentSort) {
  std::mt19937 rng(44);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<std::optional<double>> values;
    std::vector<double> rounded;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = static_cast<double>(rng() % 6) * 0.5;  // plenty of ties
      values.push_back(v);
      rounded.push_back(v);
    }
    std::vector<double> sorted = rounded;
    std::sort(sorted.rbegin(), sorted.rend());
    const double best = sorted[0];
    const std::size_t n_best = static_cast<std::size_t>(std::count(rounded.begin(), rounded.end(), best));
    std::optional<double> second;
    if (n_best == 1 && n > 1 && sorted[1] != best) second = sorted[1];
    const auto marks = Marks(Column(values));
    for (std::size_t i = 0; i < n; ++i) {
      Emphasis expected = Emphasis::kNone;
      if (rounded[i] == best) expected = Emphasis::kBest;
      else if (second && rounded[i] == *second) expected = Emphasis::kSecond;
      EXPECT_EQ(marks[i], expected) << "trial " << trial << " row " << i;
    }
  }
}

TableSpec Sample() {
  TableSpec t;
  t.title = "zero-shot";
  t.rows = {"Original", "+Ours(max)"};
  t.columns = {"model, \"A\"", "Average"};
  t.cells = {{25.25, 25.25}, {25.53, std::nullopt}};
  return t;
}

TEST(EmitTableTest, Markdown) {
  const std::string md = EmitTable(Sample(), TableFormat::kMarkdown);
  EXPECT_EQ(md,
            "### zero-shot\n\n"
            "| Method | model, \"A\" | Average |\n"
            "|---|---:|---:|\n"
            "| Original | _25.25_ | **25.25** |\n"
            "| +Ours(max) | **25.53** | - |\n"
            "\nBest per column in **bold**, second best in _italics_.\n");
}

TEST(EmitTableTest, CsvRoundTripsToTwoDecimals) {
  TableSpec t = Sample();
  t.cells[0][0] = 25.254;
  const std::string csv = EmitTable(t, TableFormat::kCsv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "arm,\"model, \"\"A\"\"\",Average");
  TableSpec back = ParseCsvTable(csv);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_EQ(back.columns, t.columns);
  EXPECT_EQ(back.cells[0][0], 25.25);
  EXPECT_EQ(back.cells[1][1], std::nullopt);
  EXPECT_EQ(EmitTable(back, TableFormat::kCsv), csv);
}

TEST(EmitTableTest, IsDeterministic) {
  EXPECT_EQ(EmitTable(Sample(), TableFormat::kMarkdown), EmitTable(Sample(), TableFormat::kMarkdown));
}

TEST(EmitTableTest, RaggedGridIsRejected) {
  TableSpec t = Sample();
  t.cells[1].pop_back();
  EXPECT_THROW(EmitTable(t, TableFormat::kMarkdown), ValidationError);
  t = Sample();
  t.rows.push_back("extra");
  EXPECT_THROW(EmitTable(t, TableFormat::kCsv), ValidationError);
  EXPECT_THROW(ParseCsvTable("arm,a\nx,1,2\n"), ValidationError);
  EXPECT_THROW(ParseCsvTable("arm,a\nx,abc\n"), ValidationError);
}

TEST(FormatTest, FixedTwoDecimals) {
  EXPECT_EQ(FormatFixed2(9.58), "9.58");
  EXPECT_EQ(FormatFixed2(0.005), "0.01");
  EXPECT_EQ(FormatFixed2(-0.001), "0.00");
  EXPECT_EQ(FormatFixed2(100.0), "100.00");
  EXPECT_EQ(FormatFixed2(-12.345), "-12.35");
}

RunResult Cell(std::string task, std::string transform, double value, std::string model,
               double temperature = 0.7) {
  RunResult r;
  r.task_id = std::move(task);
  r.transform_id = std::move(transform);
  r.model = std::move(model);
  r.temperature = temperature;
  r.value = value;
  r.n_samples = 4;
  return r;
}

std::vector<RunResult> Grid(const std::vector<double>& temperatures) {
  std::vector<RunResult> rs;
  for (double t : temperatures) {
    for (const std::string model : {"m1", "m2"}) {
      rs.push_back(Cell("a", "vanilla", 0.5, model, t));
      rs.push_back(Cell("a", "cot", 0.55, model, t));
      for (int s = 1; s <= 11; ++s) {
        const std::string id = (s < 10 ? "EP0" : "EP") + std::to_string(s);
        rs.push_back(Cell("a", id, 0.5 + 0.01 * s * t, model, t));
      }
    }
  }
  return rs;
}

TEST(TableFromSettingTest, RowsAndAverageColumn) {
  AggregateReport report = BuildReport(Grid({0.7}));
  TableSpec t = TableFromSetting(report.settings[0]);
  EXPECT_EQ(t.rows, (std::vector<std::string>{"Original", "+Zero-shot-CoT", "+Ours(avg)", "+Ours(max)"}));
  EXPECT_EQ(t.columns, (std::vector<std::string>{"m1", "m2", "Average"}));
  EXPECT_NEAR(*t.cells[0][2], 50.0, 1e-9);
  EXPECT_NEAR(*t.cells[3][0], 50.0 + 11 * 0.7, 1e-9);
}

TEST(PlotDataTest, StimulusBarsHaveElevenBars) {
  PlotData p = MakePlotData(BuildReport(Grid({0.7})), PlotKind::kStimulusBars);
  ASSERT_EQ(p.series.size(), 1u);
  EXPECT_EQ(p.series[0].x.size(), 11u);
  EXPECT_EQ(p.series[0].x.front(), "EP01");
  Json j = PlotDataToJson(p);
  EXPECT_EQ(j["kind"], "stimulus_bars");
  EXPECT_EQ(j["series"][0]["y"].size(), 11u);
  EXPECT_TRUE(j["meta"].contains("x_label"));
}

TEST(PlotDataTest, TemperatureCurvesHaveTwoSeriesOfFive) {
  PlotData p = MakePlotData(BuildReport(Grid({0.0, 0.4, 0.7, 1.0, 1.5})), PlotKind::kTemperatureCurves);
  ASSERT_EQ(p.series.size(), 2u);
  EXPECT_EQ(p.series[0].label, "vanilla");
  EXPECT_EQ(p.series[1].label, "emotionprompt");
  EXPECT_EQ(p.series[0].y.size(), 5u);
  EXPECT_EQ(p.series[1].y.size(), 5u);
  EXPECT_LT(p.series[1].y[0], p.series[1].y[4]);
}

TEST(PlotDataTest, RelativeGainBars) {
  PlotData p = MakePlotData(BuildReport(Grid({0.7})), PlotKind::kRelativeGainBars);
  ASSERT_EQ(p.series.size(), 1u);
  EXPECT_EQ(p.series[0].x.size(), 2u);
  EXPECT_EQ(p.meta["gain_definition"], "ours_max - original");
}

TEST(PlotDataTest, InsufficientDataIsAnError) {
  std::vector<RunResult> vanilla_only = {Cell("a", "vanilla", 0.5, "m")};
  AggregateReport report = BuildReport(vanilla_only);
  EXPECT_THROW(MakePlotData(report, PlotKind::kStimulusBars), ValidationError);
  EXPECT_THROW(MakePlotData(report, PlotKind::kTemperatureCurves), ValidationError);
  EXPECT_THROW(MakePlotData(AggregateReport{}, PlotKind::kRelativeGainBars), ValidationError);
  PlotData ragged{PlotKind::kStimulusBars, {{"s", {Json("a")}, {1.0, 2.0}}}, Json::object()};
  EXPECT_THROW(PlotDataToJson(ragged), ValidationError);
}

TEST(PlotDataTest, WritePlotsEmitsSupportedKinds) {
  TempDir dir;
  auto paths = WritePlots(BuildReport(Grid({0.7})), dir.path());
  std::set<std::string> names;
  for (const auto& p : paths) names.insert(p.filename().string());
  EXPECT_TRUE(names.count("stimulus_bars.json"));
  EXPECT_TRUE(names.count("relative_gain_bars.json"));
  EXPECT_FALSE(names.count("temperature_curves.json"));
  Json bars = ReadJsonFile(dir / "stimulus_bars.json");
  EXPECT_EQ(bars["kind"], "stimulus_bars");
}

TEST(PlotKindTest, Parse) {
  EXPECT_EQ(ParsePlotKind("temperature_curves"), PlotKind::kTemperatureCurves);
  EXPECT_THROW(ParsePlotKind("pie"), ValidationError);
  EXPECT_EQ(ParseTableFormat("md"), TableFormat::kMarkdown);
  EXPECT_THROW(ParseTableFormat("html"), ValidationError);
}

}  // namespace
}  // namespace emostim
