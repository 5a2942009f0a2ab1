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

#include "emostim/response_cache.hpp"

#include <algorithm>
#include <cctype>

#include <spdlog/spdlog.h>

#include "emostim/error.hpp"

namespace emostim {

namespace fs = std::filesystem;

namespace {

bool IsHexHash(std::string_view hash) {
  return hash.size() == 64 && std::all_of(hash.begin(), hash.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f');
         });
}

bool IsEntryFile(const fs::directory_entry& entry) {
  return entry.is_regular_file() && entry.path().extension() == ".json" &&
         IsHexHash(entry.path().stem().string());
}

}  // namespace

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create cache directory " + dir_.string() + ": " + ec.message());
}

fs::path ResponseCache::EntryPath(std::string_view hash) const {
  if (!IsHexHash(hash)) {
    throw ValidationError("", "request_hash", "not a 64-hex request hash: " + std::string(hash));
  }
  return dir_ / std::string(hash.substr(0, 2)) / (std::string(hash) + ".json");
}

std::optional<CompletionRecord> ResponseCache::Lookup(std::string_view hash) const {
  const fs::path path = EntryPath(hash);
  std::error_code ec;
  if (!fs::exists(path, ec)) return std::nullopt;
  try {
    CompletionRecord record = CompletionRecordFromJson(ReadJsonFile(path), path.string());
    if (record.request_hash != hash) {
      spdlog::warn("cache entry {} records hash {}; ignoring", path.string(), record.request_hash);
      return std::nullopt;
    }
    record.from_cache = true;
    return record;
  } catch (const std::exception& e) {
    spdlog::warn("unreadable cache entry {}: {}", path.string(), e.what());
    return std::nullopt;
  }
}

void ResponseCache::Store(const CompletionRecord& record) const {
  WriteFileAtomically(EntryPath(record.request_hash),
                      CompletionRecordToJson(record).dump(2) + "\n");
}

CacheStats ResponseCache::Stats() const {
  CacheStats stats;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir_, ec), end; !ec && it != end; it.increment(ec)) {
    if (IsEntryFile(*it)) {
      ++stats.entries;
      stats.bytes += it->file_size();
    }
  }
  return stats;
}

std::size_t ResponseCache::Clear() const {
  std::vector<fs::path> doomed;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(dir_, ec), end; !ec && it != end; it.increment(ec)) {
    if (IsEntryFile(*it)) doomed.push_back(it->path());
  }
  std::size_t removed = 0;
  for (const auto& path : doomed) {
    if (fs::remove(path, ec)) ++removed;
  }
  // Drop the now-empty two-hex shard directories.
  for (const auto& entry : fs::directory_iterator(dir_, ec)) {
    if (entry.is_directory() && entry.path().filename().string().size() == 2 &&
        fs::is_empty(entry.path())) {
      fs::remove(entry.path(), ec);
    }
  }
  return removed;
}

}  // namespace emostim
