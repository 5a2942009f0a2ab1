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

#include "emostim/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "emostim/error.hpp"

namespace emostim {

namespace {

// Treats every non-ASCII byte as part of a word so UTF-8 letters never act
// as boundaries.
bool IsWordByte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u);
}

bool ContainsWord(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return false;
  for (std::size_t pos = haystack.find(needle); pos != std::string::npos;
       pos = haystack.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !IsWordByte(haystack[pos - 1]) || !IsWordByte(needle.front());
    const std::size_t end = pos + needle.size();
    const bool right_ok =
        end == haystack.size() || !IsWordByte(haystack[end]) || !IsWordByte(needle.back());
    if (left_ok && right_ok) return true;
  }
  return false;
}

std::set<std::string> Tokens(const std::string& normalized) {
  std::set<std::string> out;
  std::string current;
  auto flush = [&] {
    std::string token = NormalizeAnswer(current);
    if (!token.empty()) out.insert(std::move(token));
    current.clear();
  };
  for (char c : normalized) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

// Index of the choice named by a leading option letter: "(B)", "B.", "B)",
// "B:" or a bare "B".
std::optional<std::size_t> LeadingLetter(std::string_view candidate, std::size_t n_choices) {
  std::size_t i = 0;
  bool paren = false;
  if (i < candidate.size() && candidate[i] == '(') {
    paren = true;
    ++i;
  }
  if (i >= candidate.size() || !std::isalpha(static_cast<unsigned char>(candidate[i]))) {
    return std::nullopt;
  }
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(candidate[i])));
  ++i;
  if (paren) {
    if (i >= candidate.size() || candidate[i] != ')') return std::nullopt;
  } else if (i < candidate.size() && candidate[i] != '.' && candidate[i] != ')' &&
             candidate[i] != ':') {
    return std::nullopt;
  }
  const auto index = static_cast<std::size_t>(letter - 'A');
  if (index >= n_choices) return std::nullopt;
  return index;
}

struct ChoicePick {
  std::optional<std::string> choice;
  bool ambiguous = false;
};

ChoicePick PickChoice(const std::vector<std::string>& choices, std::string_view response) {
  ChoicePick pick;
  for (const std::string& candidate : AnswerCandidates(response)) {
    if (auto index = LeadingLetter(candidate, choices.size())) {
      pick.choice = choices[*index];
      return pick;
    }
    const std::string haystack = NormalizeAnswer(candidate);
    std::set<std::string> matched;
    for (const std::string& choice : choices) {
      const std::string needle = NormalizeAnswer(choice);
      if (ContainsWord(haystack, needle)) matched.insert(choice);
    }
    // A choice that is a substring of another ("red" in "dark red") counts
    // once: keep only maximal matches.
    std::set<std::string> maximal;
    for (const std::string& a : matched) {
      const std::string na = NormalizeAnswer(a);
      bool dominated = false;
      for (const std::string& b : matched) {
        if (a == b) continue;
        const std::string nb = NormalizeAnswer(b);
        if (nb.size() > na.size() && ContainsWord(nb, na)) dominated = true;
      }
      if (!dominated) maximal.insert(a);
    }
    if (maximal.size() == 1) {
      pick.choice = *maximal.begin();
      pick.ambiguous = false;
      return pick;
    }
    if (maximal.size() > 1) pick.ambiguous = true;
  }
  return pick;
}

double ScoreExact(const Sample& sample, std::string_view response, std::string* extracted) {
  std::vector<std::string> golds;
  for (const auto& g : sample.golds) golds.push_back(NormalizeAnswer(g));
  const auto candidates = AnswerCandidates(response);
  for (const std::string& candidate : candidates) {
    const std::string norm = NormalizeAnswer(candidate);
    if (std::find(golds.begin(), golds.end(), norm) != golds.end()) {
      *extracted = norm;
      return 1.0;
    }
  }
  *extracted = candidates.empty() ? std::string() : NormalizeAnswer(candidates.front());
  return 0.0;
}

double ScoreContains(const Sample& sample, std::string_view response, std::string* extracted) {
  const std::string haystack = NormalizeAnswer(response);
  *extracted = haystack;
  for (const auto& g : sample.golds) {
    const std::string needle = NormalizeAnswer(g);
    if (!needle.empty() && haystack.find(needle) != std::string::npos) return 1.0;
  }
  return 0.0;
}

double ScoreSet(const Sample& sample, std::string_view response, std::string* extracted) {
  std::set<std::string> gold_tokens;
  for (const auto& g : sample.golds) {
    auto t = Tokens(NormalizeAnswer(g));
    gold_tokens.insert(t.begin(), t.end());
  }
  const auto response_tokens = Tokens(NormalizeAnswer(response));
  std::string joined;
  for (const auto& t : response_tokens) {
    if (!joined.empty()) joined += ", ";
    joined += t;
  }
  *extracted = joined;
  return !gold_tokens.empty() && response_tokens == gold_tokens ? 1.0 : 0.0;
}

std::optional<double> LastNumeral(const std::string& normalized, std::string* text) {
  std::optional<double> last;
  for (std::size_t i = 0; i < normalized.size();) {
    const bool sign = normalized[i] == '-' && i + 1 < normalized.size() &&
                      std::isdigit(static_cast<unsigned char>(normalized[i + 1])) &&
                      (i == 0 || !IsWordByte(normalized[i - 1]));
    if (!sign && !std::isdigit(static_cast<unsigned char>(normalized[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < normalized.size() &&
           (std::isdigit(static_cast<unsigned char>(normalized[j])) ||
            ((normalized[j] == '.' || normalized[j] == ',') && j + 1 < normalized.size() &&
             std::isdigit(static_cast<unsigned char>(normalized[j + 1]))))) {
      ++j;
    }
    const std::string token = normalized.substr(i, j - i);
    if (auto v = ParseNumber(token)) {
      last = v;
      *text = token;
    }
    i = j;
  }
  return last;
}

bool SameNumber(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double ScoreNumeric(const Sample& sample, std::string_view response, std::string* extracted) {
  std::optional<double> value;
  for (const std::string& candidate : AnswerCandidates(response)) {
    if ((value = ParseNumber(candidate))) {
      *extracted = NormalizeAnswer(candidate);
      break;
    }
  }
  if (!value) value = LastNumeral(NormalizeAnswer(response), extracted);
  if (!value) {
    *extracted = NormalizeAnswer(response);
    return 0.0;
  }
  for (const auto& g : sample.golds) {
    if (auto gold = ParseNumber(g); gold && SameNumber(*gold, *value)) return 1.0;
  }
  return 0.0;
}

}  // namespace

ScoreRecord ScoreSample(const TaskSpec& task, const Sample& sample, std::string_view response) {
  ScoreRecord record;
  record.task_id = task.id;
  record.sample_id = sample.id;
  record.raw_response = std::string(response);
  const Sample* begin = task.samples.data();
  if (&sample >= begin && &sample < begin + task.samples.size()) {
    record.sample_index = static_cast<std::size_t>(&sample - begin);
  } else {
    auto it = std::find_if(task.samples.begin(), task.samples.end(),
                           [&](const Sample& s) { return s.id == sample.id; });
    if (it == task.samples.end()) {
      throw ValidationError(task.id, "samples", "sample '" + sample.id + "' is not part of the task");
    }
    record.sample_index = static_cast<std::size_t>(it - task.samples.begin());
  }

  switch (task.match_mode) {
    case MatchMode::kExact:
      record.correct = ScoreExact(sample, response, &record.extracted_answer);
      break;
    case MatchMode::kContains:
      record.correct = ScoreContains(sample, response, &record.extracted_answer);
      break;
    case MatchMode::kSet:
      record.correct = ScoreSet(sample, response, &record.extracted_answer);
      break;
    case MatchMode::kNumeric:
      record.correct = ScoreNumeric(sample, response, &record.extracted_answer);
      break;
    case MatchMode::kMultichoice: {
      if (!sample.choices) {
        throw ValidationError(task.id, "samples[" + sample.id + "].choices",
                              "multichoice scoring needs choices");
      }
      const ChoicePick pick = PickChoice(*sample.choices, response);
      if (pick.choice) {
        record.extracted_answer = *pick.choice;
        record.correct = std::find(sample.golds.begin(), sample.golds.end(), *pick.choice) !=
                                 sample.golds.end()
                             ? 1.0
                             : 0.0;
      } else if (pick.ambiguous) {
        record.flagged = true;
        record.flag_reason = "response matches several choices";
      }
      break;
    }
    case MatchMode::kJudged:
      record.extracted_answer = NormalizeAnswer(response);
      break;
  }
  return record;
}

double TaskAccuracy(std::span<const ScoreRecord> records) {
  if (records.empty()) throw Error(ErrorKind::kData, "task accuracy of an empty record list");
  double sum = 0.0;
  for (const ScoreRecord& r : records) {
    if (r.task_id != records.front().task_id) {
      throw Error(ErrorKind::kData, "task accuracy over mixed tasks: '" +
                                        records.front().task_id + "' and '" + r.task_id + "'");
    }
    sum += r.correct;
  }
  return sum / static_cast<double>(records.size());
}

double NormalizedPreferred(double raw, double random_baseline, double high) {
  if (!(high > random_baseline)) {
    throw Error(ErrorKind::kData, "normalized preferred metric needs high > random baseline (high=" +
                                      std::to_string(high) +
                                      ", baseline=" + std::to_string(random_baseline) + ")");
  }
  return 100.0 * (raw - random_baseline) / (high - random_baseline);
}

namespace {

template <typename Get>
double PercentOf(std::span<const ScoreRecord> records, Get get, const char* label) {
  std::size_t n = 0;
  std::size_t yes = 0;
  for (const ScoreRecord& r : records) {
    if (!r.judge_labels) continue;
    const std::optional<bool> v = get(*r.judge_labels);
    if (!v) continue;
    ++n;
    if (*v) ++yes;
  }
  if (n == 0) throw Error(ErrorKind::kData, std::string("no records carry a '") + label + "' label");
  return static_cast<double>(yes) / static_cast<double>(n);
}

}  // namespace

double PercentTrue(std::span<const ScoreRecord> records) {
  return PercentOf(records, [](const JudgeLabels& l) { return l.truthful; }, "truthful");
}

double PercentInformative(std::span<const ScoreRecord> records) {
  return PercentOf(records, [](const JudgeLabels& l) { return l.informative; }, "informative");
}

Json ScoreRecordToJson(const ScoreRecord& record) {
  Json j = {{"task_id", record.task_id},
            {"sample_index", record.sample_index},
            {"sample_id", record.sample_id},
            {"raw_response", record.raw_response},
            {"extracted_answer", record.extracted_answer},
            {"correct", record.correct},
            {"flagged", record.flagged}};
  if (!record.flag_reason.empty()) j["flag_reason"] = record.flag_reason;
  if (record.judge_labels) {
    Json labels = Json::object();
    if (record.judge_labels->truthful) labels["truthful"] = *record.judge_labels->truthful;
    if (record.judge_labels->informative) labels["informative"] = *record.judge_labels->informative;
    if (!record.judge_labels->rubric_scores.empty()) {
      labels["rubric_scores"] = record.judge_labels->rubric_scores;
    }
    j["judge_labels"] = labels;
  } else {
    j["judge_labels"] = nullptr;
  }
  return j;
}

ScoreRecord ScoreRecordFromJson(const Json& json, const std::string& source) {
  if (!json.is_object()) throw ValidationError(source, "", "score record must be an object");
  JsonFields f(json, source);
  ScoreRecord r;
  r.task_id = f.RequireNonEmptyString("task_id");
  const auto index = f.OptionalInteger("sample_index");
  if (!index || *index < 0) f.Fail("sample_index", "must be a non-negative integer");
  r.sample_index = static_cast<std::size_t>(*index);
  r.sample_id = f.OptionalString("sample_id").value_or(std::to_string(r.sample_index));
  r.raw_response = f.RequireString("raw_response");
  r.extracted_answer = f.OptionalString("extracted_answer").value_or("");
  const auto correct = f.OptionalNumber("correct");
  if (!correct) f.Fail("correct", "missing number");
  if (!(*correct >= 0.0 && *correct <= 1.0)) f.Fail("correct", "must lie in [0, 1]");
  r.correct = *correct;
  if (f.Has("flagged")) {
    const Json& flagged = f.Require("flagged");
    if (!flagged.is_boolean()) f.Fail("flagged", "must be a boolean");
    r.flagged = flagged.get<bool>();
  }
  r.flag_reason = f.OptionalString("flag_reason").value_or("");
  if (f.Has("judge_labels") && !f.Require("judge_labels").is_null()) {
    const Json& labels = f.Require("judge_labels");
    if (!labels.is_object()) f.Fail("judge_labels", "must be an object or null");
    JudgeLabels out;
    if (labels.contains("truthful")) out.truthful = labels.at("truthful").get<bool>();
    if (labels.contains("informative")) out.informative = labels.at("informative").get<bool>();
    if (labels.contains("rubric_scores")) {
      out.rubric_scores = labels.at("rubric_scores").get<std::map<std::string, int>>();
    }
    r.judge_labels = out;
  }
  return r;
}

std::string ScoresToJsonl(std::span<const ScoreRecord> records) {
  std::string out;
  for (const ScoreRecord& r : records) {
    out += ScoreRecordToJson(r).dump(-1, ' ', false, Json::error_handler_t::replace);
    out += '\n';
  }
  return out;
}

std::vector<ScoreRecord> ReadScoresJsonl(const std::filesystem::path& path) {
  std::istringstream in(ReadTextFile(path));
  std::vector<ScoreRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string source = path.string() + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw ValidationError(source, "", std::string("invalid JSON: ") + e.what());
    }
    out.push_back(ScoreRecordFromJson(j, source));
  }
  return out;
}

}  // namespace emostim
