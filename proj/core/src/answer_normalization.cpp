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

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "emostim/error.hpp"
#include "emostim/scoring.hpp"

namespace emostim {

namespace {

bool IsStrippable(UChar32 c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?': case '"': case '\'':
      return true;
    default:
      return u_isUWhiteSpace(c) != 0;
  }
}

std::string Trimmed(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string LowerAscii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<int> NumberWord(std::string_view w) {
  static constexpr std::array<std::string_view, 20> kSmall = {
      "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
      "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen",
      "eighteen", "nineteen"};
  static constexpr std::array<std::string_view, 8> kTens = {
      "twenty", "thirty", "forty", "fifty", "sixty", "seventy", "eighty", "ninety"};
  for (std::size_t i = 0; i < kSmall.size(); ++i) {
    if (kSmall[i] == w) return static_cast<int>(i);
  }
  for (std::size_t i = 0; i < kTens.size(); ++i) {
    if (kTens[i] == w) return static_cast<int>(20 + 10 * i);
  }
  return std::nullopt;
}

std::optional<double> ParseNumberWords(const std::string& normalized) {
  std::vector<std::string> words;
  std::string current;
  for (char c : normalized) {
    if (c == ' ' || c == '-') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  if (words.empty()) return std::nullopt;

  if (words.back() == "hundred") {
    if (words.size() == 1) return 100.0;
    if (words.size() == 2 && (words[0] == "one" || words[0] == "a")) return 100.0;
    return std::nullopt;
  }
  if (words.size() == 1) {
    if (auto v = NumberWord(words[0])) return *v;
    return std::nullopt;
  }
  if (words.size() == 2) {
    auto tens = NumberWord(words[0]);
    auto ones = NumberWord(words[1]);
    if (tens && ones && *tens >= 20 && *tens % 10 == 0 && *ones >= 1 && *ones <= 9) {
      return *tens + *ones;
    }
  }
  return std::nullopt;
}

std::optional<double> ParseNumeral(const std::string& normalized) {
  std::string cleaned;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const char c = normalized[i];
    // Thousands separators: a comma between digits.
    if (c == ',' && i > 0 && i + 1 < normalized.size() &&
        std::isdigit(static_cast<unsigned char>(normalized[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(normalized[i + 1]))) {
      continue;
    }
    cleaned.push_back(c);
  }
  std::size_t i = 0;
  if (i < cleaned.size() && (cleaned[i] == '-' || cleaned[i] == '+')) ++i;
  const std::size_t digits_start = i;
  while (i < cleaned.size() && std::isdigit(static_cast<unsigned char>(cleaned[i]))) ++i;
  if (i == digits_start) return std::nullopt;
  if (i < cleaned.size() && cleaned[i] == '.') {
    ++i;
    const std::size_t frac_start = i;
    while (i < cleaned.size() && std::isdigit(static_cast<unsigned char>(cleaned[i]))) ++i;
    if (i == frac_start) return std::nullopt;
  }
  if (i != cleaned.size()) return std::nullopt;
  return std::strtod(cleaned.c_str(), nullptr);
}

}  // namespace

std::string NormalizeAnswer(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kData, "ICU NFC normalizer unavailable");

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<std::int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());
  icu::UnicodeString normalized = nfc->normalize(u, status);
  if (U_FAILURE(status)) throw Error(ErrorKind::kData, "NFC normalization failed");

  // Collapse whitespace runs.
  icu::UnicodeString collapsed;
  bool in_space = false;
  for (std::int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      in_space = true;
      continue;
    }
    if (in_space && collapsed.length() > 0) collapsed.append(static_cast<UChar>(' '));
    in_space = false;
    collapsed.append(c);
  }

  std::int32_t begin = 0;
  std::int32_t end = collapsed.length();
  while (begin < end) {
    const UChar32 c = collapsed.char32At(begin);
    if (!IsStrippable(c)) break;
    begin += U16_LENGTH(c);
  }
  while (end > begin) {
    const UChar32 c = collapsed.char32At(end - 1);
    if (!IsStrippable(c)) break;
    end -= U16_LENGTH(c);
  }
  std::string out;
  collapsed.tempSubStringBetween(begin, end).toUTF8String(out);
  return out;
}

std::optional<double> ParseNumber(std::string_view text) {
  const std::string normalized = NormalizeAnswer(text);
  if (normalized.empty()) return std::nullopt;
  if (auto v = ParseNumeral(normalized)) return v;
  return ParseNumberWords(normalized);
}

std::vector<std::string> AnswerCandidates(std::string_view response) {
  std::vector<std::string> out;
  auto add = [&](std::string candidate) {
    candidate = Trimmed(candidate);
    if (candidate.empty()) return;
    if (std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(std::move(candidate));
  };

  const std::string lower = LowerAscii(response);
  std::size_t marker_end = std::string::npos;
  for (std::string_view marker : {std::string_view("answer is"), std::string_view("answer:")}) {
    const std::size_t pos = lower.rfind(marker);
    if (pos != std::string::npos) {
      const std::size_t end = pos + marker.size();
      if (marker_end == std::string::npos || end > marker_end) marker_end = end;
    }
  }
  if (marker_end != std::string::npos) {
    std::string_view rest = response.substr(marker_end);
    const std::size_t nl = rest.find('\n');
    add(std::string(rest.substr(0, nl)));
  }

  add(std::string(response));

  const std::string full = Trimmed(response);
  const std::size_t clause_end = full.find_first_of(".,;\n(");
  if (clause_end != std::string::npos) add(full.substr(0, clause_end));

  const std::size_t first_nl = full.find('\n');
  if (first_nl != std::string::npos) {
    add(full.substr(0, first_nl));
    std::size_t last_nl = full.find_last_of('\n');
    add(full.substr(last_nl + 1));
  }
  return out;
}

}  // namespace emostim
