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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "emostim/model_spec.hpp"
#include "emostim/rate_limiter.hpp"
#include "emostim/response_cache.hpp"
#include "emostim/transport.hpp"

namespace emostim {

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{60000};
  /// Each delay is scaled by a factor drawn from [1 - jitter, 1 + jitter].
  double jitter = 0.25;
};

/// Delay before attempt `attempt + 1` (attempt counts from 1), without jitter.
std::chrono::milliseconds BackoffDelay(const RetryPolicy& policy, int attempt);

/// Parses a Retry-After header value given in seconds; HTTP-date values are
/// not supported and yield nullopt.
std::optional<std::chrono::milliseconds> ParseRetryAfter(std::string_view value);

struct ClientOptions {
  /// Absent disables caching.
  std::optional<std::filesystem::path> cache_dir;
  std::shared_ptr<HttpTransport> transport;  // defaults to MakeHttpTransport()
  RetryPolicy retry;
  /// Per-endpoint admission rate; 0 disables limiting.
  double rate_limit_rpm = 0.0;
  std::string api_key_env = "EMOSTIM_API_KEY";
  /// Overrides the environment lookup (tests).
  std::optional<std::string> api_key;
  std::chrono::milliseconds request_timeout{60000};
  /// Replaces std::this_thread::sleep_for for backoff waits (tests).
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct ClientCounters {
  std::uint64_t network_requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
};

/// Uniform completion interface over http_chat endpoints and the mock
/// backends. Safe to call from many threads at once.
class ModelClient {
 public:
  explicit ModelClient(ClientOptions options = {});

  /// mock_oracle, mock_uniform_choice and echo-gold scripted rules need
  /// `sample_context`. Throws NetworkError once retries are exhausted,
  /// ConfigError when an http model has no API key.
  CompletionRecord Complete(const ModelSpec& spec, std::string_view prompt,
                            const Sample* sample_context = nullptr);

  const ResponseCache* cache() const { return cache_ ? &*cache_ : nullptr; }
  ClientCounters counters() const;

  /// The request body sent for an http_chat call.
  static Json ChatRequestBody(const ModelSpec& spec, std::string_view prompt);

  /// Throws ConfigError when `spec` is http_chat and no key is available.
  void RequireCredentials(const ModelSpec& spec) const;

 private:
  std::string ApiKey() const;
  std::string CompleteMock(const ModelSpec& spec, std::string_view prompt,
                           const Sample* sample, const std::string& hash) const;
  CompletionRecord CompleteHttp(const ModelSpec& spec, std::string_view prompt,
                                const std::string& hash);
  TokenBucket& BucketFor(const std::string& endpoint);
  void Sleep(std::chrono::milliseconds delay) const;

  ClientOptions options_;
  std::optional<ResponseCache> cache_;
  std::mutex buckets_mu_;
  std::map<std::string, std::unique_ptr<TokenBucket>> buckets_;
  std::atomic<std::uint64_t> network_requests_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> cache_misses_{0};
};

/// UTC timestamp, e.g. "2026-10-14T09:30:00Z".
std::string UtcTimestamp();

}  // namespace emostim
