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

#include "emostim/attribution_report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "emostim/error.hpp"

namespace emostim {

namespace {

AttributionResult ParseOne(const Json& json, const std::string& source, const std::string& prefix) {
  if (!json.is_object()) throw ValidationError(source, prefix, "expected an attribution object");
  JsonFields f(json, source, prefix);
  AttributionResult out;
  out.task_id = f.RequireNonEmptyString("task_id");
  out.lexicon_version = f.RequireNonEmptyString("lexicon_version");

  const Json& variants = f.Require("per_variant");
  if (!variants.is_object()) f.Fail("per_variant", "expected {transform_id: [tokens]}");
  for (const auto& [variant, tokens] : variants.items()) {
    const std::string path = f.Path("per_variant") + "." + variant;
    if (!tokens.is_array()) throw ValidationError(source, path, "expected an array of tokens");
    std::vector<TokenAttribution> list;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string item = path + "[" + std::to_string(i) + "]";
      const Json& t = tokens[i];
      if (!t.is_object() || !t.contains("token") || !t.contains("score") ||
          !t.at("token").is_string() || !t.at("score").is_number()) {
        throw ValidationError(source, item, "expected {\"token\": string, \"score\": number}");
      }
      const double score = t.at("score").get<double>();
      if (!std::isfinite(score) || score < 0.0) {
        throw ValidationError(source, item + ".score", "must be finite and >= 0");
      }
      list.push_back({t.at("token").get<std::string>(), score});
    }
    out.per_variant.emplace(variant, std::move(list));
  }

  const Json& shares = f.Require("positive_word_share");
  if (!shares.is_object()) f.Fail("positive_word_share", "expected {transform_id: share}");
  for (const auto& [variant, share] : shares.items()) {
    const std::string path = f.Path("positive_word_share") + "." + variant;
    if (!share.is_number()) throw ValidationError(source, path, "expected a number");
    const double v = share.get<double>();
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw ValidationError(source, path, "share must lie in [0, 1]");
    }
    if (out.per_variant.count(variant) == 0) {
      throw ValidationError(source, path, "share given for a variant without tokens");
    }
    out.positive_word_share.emplace(variant, v);
  }
  return out;
}

std::string Percent(double share) {
  return std::to_string(std::lround(share * 100.0)) + "%";
}

std::string Fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string EscapeCell(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::vector<AttributionResult> ParseAttribution(const Json& json, const std::string& source) {
  std::vector<AttributionResult> out;
  if (json.is_array()) {
    for (std::size_t i = 0; i < json.size(); ++i) {
      out.push_back(ParseOne(json[i], source, "[" + std::to_string(i) + "]"));
    }
  } else {
    out.push_back(ParseOne(json, source, ""));
  }
  return out;
}

std::vector<AttributionResult> LoadAttribution(const std::filesystem::path& path) {
  return ParseAttribution(ReadJsonFile(path), path.string());
}

Json AttributionToJson(const std::vector<AttributionResult>& results) {
  Json out = Json::array();
  for (const AttributionResult& r : results) {
    Json variants = Json::object();
    for (const auto& [id, tokens] : r.per_variant) {
      Json list = Json::array();
      for (const auto& t : tokens) list.push_back({{"token", t.token}, {"score", t.score}});
      variants[id] = std::move(list);
    }
    out.push_back({{"task_id", r.task_id},
                   {"per_variant", std::move(variants)},
                   {"positive_word_share", r.positive_word_share},
                   {"lexicon_version", r.lexicon_version}});
  }
  return out.size() == 1 ? out.front() : out;
}

std::vector<double> NormalizeScores(const std::vector<TokenAttribution>& tokens) {
  std::vector<double> out(tokens.size(), 0.0);
  if (tokens.empty()) return out;
  auto [lo, hi] = std::minmax_element(tokens.begin(), tokens.end(),
                                      [](const auto& a, const auto& b) { return a.score < b.score; });
  const double range = hi->score - lo->score;
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < tokens.size(); ++i) out[i] = (tokens[i].score - lo->score) / range;
  return out;
}

AttributionRendering RenderAttribution(const std::vector<AttributionResult>& results) {
  AttributionRendering out;
  out.heatmap.kind = PlotKind::kAttributionHeatmap;
  out.heatmap.meta = {{"x_label", "token"},
                      {"y_label", "importance"},
                      {"normalization", "min-max per prompt"}};
  std::string& md = out.markdown;
  md += "# Attribution report\n";
  for (const AttributionResult& r : results) {
    md += "\n## " + r.task_id + "\n\nLexicon version: " + r.lexicon_version + "\n\n";
    for (const auto& [variant, tokens] : r.per_variant) {
      auto it = r.positive_word_share.find(variant);
      double share = 0.0;
      if (it != r.positive_word_share.end()) {
        share = it->second;
      } else if (!tokens.empty()) {
        md += "- " + variant + ": positive-word share n/a\n";
        continue;
      }
      md += "- " + variant + ": positive-word share " + Percent(share) + "\n";
    }
    for (const auto& [variant, tokens] : r.per_variant) {
      const std::vector<double> normalized = NormalizeScores(tokens);
      std::vector<std::size_t> order(tokens.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return tokens[a].score > tokens[b].score;
      });
      md += "\n### " + variant + "\n\n| Rank | Token | Score | Normalized |\n|---:|---|---:|---:|\n";
      for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t i = order[rank];
        md += "| " + std::to_string(rank + 1) + " | " + EscapeCell(tokens[i].token) + " | " +
              Fixed(tokens[i].score, 4) + " | " + Fixed(normalized[i], 2) + " |\n";
      }
      if (tokens.empty()) continue;
      PlotSeries series;
      series.label = r.task_id + "/" + variant;
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        series.x.emplace_back(tokens[i].token);
        series.y.push_back(normalized[i]);
      }
      out.heatmap.series.push_back(std::move(series));
    }
  }
  return out;
}

}  // namespace emostim
