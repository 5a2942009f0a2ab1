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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "emostim/model_spec.hpp"

namespace emostim {

struct CacheStats {
  std::size_t entries = 0;
  std::uintmax_t bytes = 0;
};

/// Content-addressed store of completion records laid out as
/// `{dir}/{first two hex}/{request_hash}.json`. Writers go through a
/// temporary file and rename, so any number of processes and threads may
/// share one directory.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path EntryPath(std::string_view request_hash) const;

  /// Unreadable or corrupt entries count as a miss and are logged.
  std::optional<CompletionRecord> Lookup(std::string_view request_hash) const;
  void Store(const CompletionRecord& record) const;

  CacheStats Stats() const;
  /// Removes every entry; returns how many were deleted.
  std::size_t Clear() const;

 private:
  std::filesystem::path dir_;
};

}  // namespace emostim
