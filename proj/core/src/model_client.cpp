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

#include "emostim/model_client.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "emostim/error.hpp"
#include "random_util.hpp"

namespace emostim {

namespace {

std::string TrimSlash(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

double JitterFactor(double jitter) {
  if (jitter <= 0.0) return 1.0;
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> dist(1.0 - jitter, 1.0 + jitter);
  return dist(rng);
}

std::string Snippet(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

bool ScriptRuleMatches(const ScriptRule& rule, const ModelSpec& spec, std::string_view prompt,
                       const Sample* sample) {
  if (rule.sample_id && (sample == nullptr || sample->id != *rule.sample_id)) return false;
  if (rule.prompt_contains && prompt.find(*rule.prompt_contains) == std::string_view::npos) {
    return false;
  }
  if (rule.temperature && std::abs(*rule.temperature - spec.params.temperature) > 1e-9) {
    return false;
  }
  return true;
}

}  // namespace

std::chrono::milliseconds BackoffDelay(const RetryPolicy& policy, int attempt) {
  const double factor = std::ldexp(1.0, std::max(0, attempt - 1));
  const double ms = std::min(static_cast<double>(policy.max_delay.count()),
                             static_cast<double>(policy.base_delay.count()) * factor);
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

std::optional<std::chrono::milliseconds> ParseRetryAfter(std::string_view value) {
  while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
  while (!value.empty() && value.back() == ' ') value.remove_suffix(1);
  if (value.empty()) return std::nullopt;
  char* end = nullptr;
  const std::string text(value);
  const double seconds = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !(seconds >= 0.0) || !std::isfinite(seconds)) {
    return std::nullopt;
  }
  return std::chrono::milliseconds(static_cast<long long>(std::llround(seconds * 1000.0)));
}

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ModelClient::ModelClient(ClientOptions options) : options_(std::move(options)) {
  if (!options_.transport) options_.transport = MakeHttpTransport();
  if (options_.cache_dir) cache_.emplace(*options_.cache_dir);
}

ClientCounters ModelClient::counters() const {
  return {network_requests_.load(), cache_hits_.load(), cache_misses_.load()};
}

std::string ModelClient::ApiKey() const {
  if (options_.api_key) return *options_.api_key;
  const char* value = std::getenv(options_.api_key_env.c_str());
  return value == nullptr ? std::string{} : std::string(value);
}

void ModelClient::RequireCredentials(const ModelSpec& spec) const {
  if (spec.backend != Backend::kHttpChat) return;
  if (ApiKey().empty()) {
    throw ConfigError("model '" + spec.name + "' needs an API key: set " + options_.api_key_env +
                      " in the environment");
  }
}

void ModelClient::Sleep(std::chrono::milliseconds delay) const {
  if (delay.count() <= 0) return;
  if (options_.sleep) {
    options_.sleep(delay);
  } else {
    std::this_thread::sleep_for(delay);
  }
}

TokenBucket& ModelClient::BucketFor(const std::string& endpoint) {
  std::lock_guard lock(buckets_mu_);
  auto& bucket = buckets_[endpoint];
  if (!bucket) bucket = std::make_unique<TokenBucket>(options_.rate_limit_rpm);
  return *bucket;
}

Json ModelClient::ChatRequestBody(const ModelSpec& spec, std::string_view prompt) {
  Json body = spec.params.extra;
  body["model"] = spec.name;
  body["messages"] = Json::array({Json{{"role", "user"}, {"content", std::string(prompt)}}});
  body["temperature"] = spec.params.temperature;
  body["max_tokens"] = spec.params.max_tokens;
  if (spec.params.seed) body["seed"] = *spec.params.seed;
  return body;
}

CompletionRecord ModelClient::Complete(const ModelSpec& spec, std::string_view prompt,
                                       const Sample* sample) {
  ValidateModelSpec(spec);
  const std::string hash = RequestHash(spec, prompt, sample);
  if (cache_) {
    if (auto hit = cache_->Lookup(hash)) {
      ++cache_hits_;
      return *hit;
    }
    ++cache_misses_;
  }

  CompletionRecord record;
  if (spec.IsMock()) {
    record.request_hash = hash;
    record.model = spec.name;
    record.prompt = std::string(prompt);
    record.response_text = CompleteMock(spec, prompt, sample, hash);
    record.created_at = UtcTimestamp();
  } else {
    record = CompleteHttp(spec, prompt, hash);
  }
  if (cache_) cache_->Store(record);
  return record;
}

std::string ModelClient::CompleteMock(const ModelSpec& spec, std::string_view prompt,
                                      const Sample* sample, const std::string& hash) const {
  switch (spec.backend) {
    case Backend::kMockFixed:
      return spec.fixed_text;
    case Backend::kMockOracle:
      if (sample == nullptr) {
        throw ValidationError("", "sample_context", "mock_oracle requires a sample context");
      }
      return sample->golds.empty() ? std::string{} : sample->golds.front();
    case Backend::kMockUniformChoice: {
      if (sample == nullptr || !sample->choices || sample->choices->empty()) {
        throw ValidationError("", "sample_context",
                              "mock_uniform_choice requires a sample with choices");
      }
      const std::uint64_t hash_bits = std::stoull(hash.substr(0, 16), nullptr, 16);
      std::mt19937_64 rng(detail::SplitMix64(static_cast<std::uint64_t>(*spec.params.seed) ^
                                             hash_bits));
      return (*sample->choices)[detail::UniformBelow(rng, sample->choices->size())];
    }
    case Backend::kMockScripted:
      for (const ScriptRule& rule : spec.script) {
        if (!ScriptRuleMatches(rule, spec, prompt, sample)) continue;
        if (rule.echo_gold) {
          if (sample == nullptr || sample->golds.empty()) {
            throw ValidationError("", "script", "gold-echo rule matched without a gold answer");
          }
          return sample->golds.front();
        }
        return *rule.response;
      }
      throw ValidationError("", "script",
                            "no script rule of '" + spec.name + "' matched" +
                                (sample ? " sample '" + sample->id + "'" : std::string{}));
    case Backend::kHttpChat:
      break;
  }
  throw Error(ErrorKind::kData, "not a mock backend");
}

CompletionRecord ModelClient::CompleteHttp(const ModelSpec& spec, std::string_view prompt,
                                           const std::string& hash) {
  RequireCredentials(spec);
  const std::string endpoint = TrimSlash(*spec.base_url);
  HttpRequest request;
  request.url = endpoint + "/v1/chat/completions";
  request.headers = {{"Authorization", "Bearer " + ApiKey()},
                     {"Content-Type", "application/json"}};
  request.body = ChatRequestBody(spec, prompt).dump();
  request.timeout = options_.request_timeout;

  const int attempts = std::max(1, options_.retry.max_attempts);
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    BucketFor(endpoint).Acquire();
    ++network_requests_;
    const auto start = std::chrono::steady_clock::now();
    std::optional<std::chrono::milliseconds> advised;
    try {
      HttpResponse response = options_.transport->Post(request);
      const double latency_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
      if (response.status == 200) {
        Json body;
        try {
          body = Json::parse(response.body);
          const Json& content = body.at("choices").at(0).at("message").at("content");
          CompletionRecord record;
          record.request_hash = hash;
          record.model = spec.name;
          record.prompt = std::string(prompt);
          record.response_text = content.get<std::string>();
          record.latency_ms = latency_ms;
          if (body.contains("usage") && body["usage"].is_object()) {
            record.token_usage.prompt = body["usage"].value("prompt_tokens", 0);
            record.token_usage.completion = body["usage"].value("completion_tokens", 0);
          }
          record.created_at = UtcTimestamp();
          return record;
        } catch (const Json::exception& e) {
          throw NetworkError("malformed response body from " + request.url + ": " + e.what() +
                                 " (body: " + Snippet(response.body) + ")",
                             attempt);
        }
      }
      last_error = "HTTP " + std::to_string(response.status) + ": " + Snippet(response.body);
      if (response.status == 401 || response.status == 403) {
        throw ConfigError("request to " + request.url + " was rejected (" + last_error +
                          "); check " + options_.api_key_env);
      }
      const bool retryable =
          response.status == 429 || response.status == 408 || response.status >= 500;
      if (!retryable) {
        throw Error(ErrorKind::kData, "request to " + request.url + " failed: " + last_error);
      }
      if (response.status == 429) {
        auto it = response.headers.find("retry-after");
        if (it != response.headers.end()) advised = ParseRetryAfter(it->second);
      }
    } catch (const TransportError& e) {
      last_error = e.what();
    }
    if (attempt == attempts) break;
    const auto delay =
        advised ? *advised
                : std::chrono::milliseconds(static_cast<long long>(
                      BackoffDelay(options_.retry, attempt).count() *
                      JitterFactor(options_.retry.jitter)));
    spdlog::debug("attempt {}/{} for {} failed ({}); retrying in {} ms", attempt, attempts,
                  spec.name, last_error, delay.count());
    Sleep(delay);
  }
  throw NetworkError("model '" + spec.name + "' unreachable after " + std::to_string(attempts) +
                         " attempts: " + last_error,
                     attempts);
}

}  // namespace emostim
