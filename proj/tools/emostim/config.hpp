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

namespace emostim {

struct Config {
  std::filesystem::path cache_dir;
  std::optional<std::string> base_url;
  std::string api_key_env = "EMOSTIM_API_KEY";
  double rate_limit_rpm = 0.0;
  std::size_t parallelism = 4;
};

/// $XDG_CONFIG_HOME/emostim/config.json, else ~/.config/emostim/config.json.
std::filesystem::path DefaultConfigPath();
/// $XDG_CACHE_HOME/emostim, else ~/.cache/emostim, else ./.emostim-cache.
std::filesystem::path DefaultCacheDir();

/// Defaults, then the config file (if it exists, or must exist when
/// `required`), then EMOSTIM_CACHE_DIR. Flags are applied by the caller.
/// A config file holding an API key is rejected: secrets come only from the
/// environment.
Config LoadConfig(const std::filesystem::path& path, bool required);

}  // namespace emostim
