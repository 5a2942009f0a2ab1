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

#include "emostim/config.hpp"

#include <cstdlib>

#include "emostim/error.hpp"
#include "emostim/json_io.hpp"

namespace emostim {

namespace {

std::optional<std::filesystem::path> Env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::filesystem::path(v);
}

}  // namespace

std::filesystem::path DefaultConfigPath() {
  if (auto xdg = Env("XDG_CONFIG_HOME")) return *xdg / "emostim" / "config.json";
  if (auto home = Env("HOME")) return *home / ".config" / "emostim" / "config.json";
  return "emostim.json";
}

std::filesystem::path DefaultCacheDir() {
  if (auto xdg = Env("XDG_CACHE_HOME")) return *xdg / "emostim";
  if (auto home = Env("HOME")) return *home / ".cache" / "emostim";
  return ".emostim-cache";
}

Config LoadConfig(const std::filesystem::path& path, bool required) {
  Config config;
  config.cache_dir = DefaultCacheDir();
  if (std::filesystem::exists(path)) {
    Json json;
    try {
      json = ReadJsonFile(path);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    if (!json.is_object()) throw ConfigError(path.string() + ": config must be a JSON object");
    for (const char* secret : {"api_key", "apikey", "token", "secret"}) {
      if (json.contains(secret)) {
        throw ConfigError(path.string() + ": '" + secret +
                          "' does not belong in the config file; export the key in the "
                          "environment variable named by api_key_env instead");
      }
    }
    try {
      JsonFields f(json, path.string());
      if (auto dir = f.OptionalString("cache_dir")) config.cache_dir = *dir;
      if (auto url = f.OptionalString("base_url")) config.base_url = *url;
      if (auto env = f.OptionalString("api_key_env")) config.api_key_env = *env;
      if (auto rpm = f.OptionalNumber("rate_limit_rpm")) {
        if (*rpm < 0) f.Fail("rate_limit_rpm", "must be >= 0");
        config.rate_limit_rpm = *rpm;
      }
      if (auto p = f.OptionalInteger("parallelism")) {
        if (*p < 1) f.Fail("parallelism", "must be >= 1");
        config.parallelism = static_cast<std::size_t>(*p);
      }
    } catch (const ValidationError& e) {
      throw ConfigError(e.what());
    }
  } else if (required) {
    throw ConfigError("config file not found: " + path.string());
  }
  if (auto dir = Env("EMOSTIM_CACHE_DIR")) config.cache_dir = *dir;
  return config;
}

}  // namespace emostim
