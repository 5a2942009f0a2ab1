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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace emostim {

using Json = nlohmann::json;

/// Reads and parses a UTF-8 JSON file. Missing files and parse errors are
/// reported as ValidationError naming the file.
Json ReadJsonFile(const std::filesystem::path& path);

/// Writes `text` to `path` via a sibling temporary file and rename, so
/// readers never observe a partially written file.
void WriteFileAtomically(const std::filesystem::path& path,
                         std::string_view text);

std::string ReadTextFile(const std::filesystem::path& path);

/// Field accessors that raise ValidationError(file, field, reason) with a
/// dotted field path, e.g. "samples[3].choices".
class JsonFields {
 public:
  JsonFields(const Json& object, std::string file, std::string prefix = "");

  bool Has(std::string_view key) const;
  const Json& Require(std::string_view key) const;
  std::string RequireString(std::string_view key) const;
  std::string RequireNonEmptyString(std::string_view key) const;
  std::optional<std::string> OptionalString(std::string_view key) const;
  std::optional<double> OptionalNumber(std::string_view key) const;
  std::optional<long long> OptionalInteger(std::string_view key) const;
  std::vector<std::string> RequireStringArray(std::string_view key) const;
  std::optional<std::vector<std::string>> OptionalStringArray(
      std::string_view key) const;
  const Json& RequireArray(std::string_view key) const;

  std::string Path(std::string_view key) const;
  [[noreturn]] void Fail(std::string_view key, const std::string& reason) const;

  const std::string& file() const { return file_; }
  const std::string& prefix() const { return prefix_; }

 private:
  const Json& object_;
  std::string file_;
  std::string prefix_;
};

}  // namespace emostim
