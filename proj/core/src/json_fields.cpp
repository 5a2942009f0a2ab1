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

#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "emostim/error.hpp"
#include "emostim/json_io.hpp"

#include <unistd.h>

namespace emostim {

namespace fs = std::filesystem;

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError(path.string(), "", "cannot open file");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json ReadJsonFile(const fs::path& path) {
  if (!fs::exists(path)) {
    throw ValidationError(path.string(), "", "file does not exist");
  }
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string(), "", std::string("invalid JSON: ") + e.what());
  }
}

void WriteFileAtomically(const fs::path& path, std::string_view text) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ostringstream tmp_name;
  tmp_name << "." << path.filename().string() << ".tmp." << ::getpid() << "."
           << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << counter.fetch_add(1);
  const fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::kData, "cannot write " + tmp.string());
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
      throw Error(ErrorKind::kData, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::kData,
                "cannot rename into " + path.string() + ": " + ec.message());
  }
}

JsonFields::JsonFields(const Json& object, std::string file, std::string prefix)
    : object_(object), file_(std::move(file)), prefix_(std::move(prefix)) {
  if (!object_.is_object()) {
    throw ValidationError(file_, prefix_.empty() ? "<root>" : prefix_,
                          "expected a JSON object");
  }
}

std::string JsonFields::Path(std::string_view key) const {
  if (prefix_.empty()) return std::string(key);
  return prefix_ + "." + std::string(key);
}

void JsonFields::Fail(std::string_view key, const std::string& reason) const {
  throw ValidationError(file_, key.empty() ? prefix_ : Path(key), reason);
}

bool JsonFields::Has(std::string_view key) const {
  auto it = object_.find(key);
  return it != object_.end() && !it->is_null();
}

const Json& JsonFields::Require(std::string_view key) const {
  auto it = object_.find(key);
  if (it == object_.end() || it->is_null()) Fail(key, "missing required field");
  return *it;
}

std::string JsonFields::RequireString(std::string_view key) const {
  const Json& v = Require(key);
  if (!v.is_string()) Fail(key, "expected a string");
  return v.get<std::string>();
}

std::string JsonFields::RequireNonEmptyString(std::string_view key) const {
  std::string s = RequireString(key);
  if (s.empty()) Fail(key, "must not be empty");
  return s;
}

std::optional<std::string> JsonFields::OptionalString(std::string_view key) const {
  if (!Has(key)) return std::nullopt;
  return RequireString(key);
}

std::optional<double> JsonFields::OptionalNumber(std::string_view key) const {
  if (!Has(key)) return std::nullopt;
  const Json& v = Require(key);
  if (!v.is_number()) Fail(key, "expected a number");
  return v.get<double>();
}

std::optional<long long> JsonFields::OptionalInteger(std::string_view key) const {
  if (!Has(key)) return std::nullopt;
  const Json& v = Require(key);
  if (!v.is_number_integer()) Fail(key, "expected an integer");
  return v.get<long long>();
}

const Json& JsonFields::RequireArray(std::string_view key) const {
  const Json& v = Require(key);
  if (!v.is_array()) Fail(key, "expected an array");
  return v;
}

std::vector<std::string> JsonFields::RequireStringArray(std::string_view key) const {
  const Json& v = RequireArray(key);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_string()) {
      Fail(key, "element " + std::to_string(i) + " is not a string");
    }
    out.push_back(v[i].get<std::string>());
  }
  return out;
}

std::optional<std::vector<std::string>> JsonFields::OptionalStringArray(
    std::string_view key) const {
  if (!Has(key)) return std::nullopt;
  return RequireStringArray(key);
}

}  // namespace emostim
