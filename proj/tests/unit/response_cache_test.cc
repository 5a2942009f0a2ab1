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

#include <gtest/gtest.h>

#include <atomic>
#include <thread>
#include <vector>

#include "emostim/error.hpp"
#include "emostim/hashing.hpp"
#include "emostim/model_client.hpp"
#include "emostim/rate_limiter.hpp"
#include "test_util.hpp"

namespace emostim {
namespace {

using testing::MakeSample;
using testing::TempDir;

CompletionRecord Record(const std::string& seed_text, const std::string& response = "out") {
  CompletionRecord r;
  r.request_hash = Sha256Hex(seed_text);
  r.model = "m";
  r.prompt = seed_text;
  r.response_text = response;
  r.created_at = "2026-01-01T00:00:00Z";
  return r;
}

TEST(ResponseCacheTest, StoreThenLookup) {
  TempDir dir;
  ResponseCache cache(dir / "cache");
  CompletionRecord r = Record("a");
  EXPECT_FALSE(cache.Lookup(r.request_hash).has_value());
  cache.Store(r);
  auto hit = cache.Lookup(r.request_hash);
  ASSERT_TRUE(hit.has_value());
  EXPECT_TRUE(hit->from_cache);
  EXPECT_EQ(hit->response_text, "out");
  EXPECT_EQ(cache.EntryPath(r.request_hash),
            dir / "cache" / r.request_hash.substr(0, 2) / (r.request_hash + ".json"));
}

TEST(ResponseCacheTest, CorruptEntryIsAMiss) {
  TempDir dir;
  ResponseCache cache(dir.path());
  CompletionRecord r = Record("a");
  cache.Store(r);
  WriteFileAtomically(cache.EntryPath(r.request_hash), "{not json");
  EXPECT_FALSE(cache.Lookup(r.request_hash).has_value());

  // An entry filed under the wrong hash is also ignored.
  CompletionRecord other = Record("b");
  WriteFileAtomically(cache.EntryPath(r.request_hash), CompletionRecordToJson(other).dump());
  EXPECT_FALSE(cache.Lookup(r.request_hash).has_value());
}

TEST(ResponseCacheTest, RejectsNonHashKeys) {
  TempDir dir;
  ResponseCache cache(dir.path());
  EXPECT_THROW(cache.EntryPath("../../etc/passwd"), ValidationError);
  EXPECT_THROW(cache.EntryPath(std::string(64, 'G')), ValidationError);
}

TEST(ResponseCacheTest, StatsAndClear) {
  TempDir dir;
  ResponseCache cache(dir.path());
  for (int i = 0; i < 5; ++i) cache.Store(Record(std::to_string(i)));
  WriteFileAtomically(dir / "README.txt", "not an entry");
  CacheStats stats = cache.Stats();
  EXPECT_EQ(stats.entries, 5u);
  EXPECT_GT(stats.bytes, 0u);
  EXPECT_EQ(cache.Clear(), 5u);
  EXPECT_EQ(cache.Stats().entries, 0u);
  EXPECT_TRUE(std::filesystem::exists(dir / "README.txt"));
}

TEST(ResponseCacheTest, ConcurrentWritersOfTheSameKeyLeaveAValidEntry) {
  TempDir dir;
  ResponseCache cache(dir.path());
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&cache, t] {
      for (int i = 0; i < 50; ++i) {
        cache.Store(Record("shared", "writer " + std::to_string(t)));
        cache.Store(Record("k" + std::to_string(t) + "_" + std::to_string(i)));
        auto hit = cache.Lookup(Sha256Hex("shared"));
        ASSERT_TRUE(hit.has_value());
        ASSERT_EQ(hit->response_text.rfind("writer ", 0), 0u);
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(cache.Stats().entries, 8u * 50u + 1u);
}

TEST(ResponseCacheTest, ConcurrentClientsComputeEachMockKeyConsistently) {
  TempDir dir;
  ClientOptions options;
  options.cache_dir = dir.path();
  ModelClient client(options);
  ModelSpec oracle = ParseModelSpec("mock:oracle");
  std::vector<Sample> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(MakeSample(std::to_string(i), "x", {"g" + std::to_string(i)}));

  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 6; ++t) {
    threads.emplace_back([&] {
      for (const Sample& s : samples) {
        if (client.Complete(oracle, "same prompt", &s).response_text != s.golds[0]) ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(mismatches.load(), 0);
  EXPECT_EQ(client.cache()->Stats().entries, 20u);
  ClientCounters c = client.counters();
  EXPECT_EQ(c.cache_hits + c.cache_misses, 120u);
  EXPECT_GE(c.cache_misses, 20u);
}

TEST(TokenBucketTest, ZeroRateNeverBlocks) {
  TokenBucket bucket(0.0);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(bucket.TryAcquire());
}

TEST(TokenBucketTest, BurstThenRefusesUntilRefill) {
  TokenBucket bucket(60.0, 3.0);
  EXPECT_TRUE(bucket.TryAcquire());
  EXPECT_TRUE(bucket.TryAcquire());
  EXPECT_TRUE(bucket.TryAcquire());
  EXPECT_FALSE(bucket.TryAcquire());
}

TEST(TokenBucketTest, AcquireWaitsForRefill) {
  TokenBucket bucket(1200.0);  // one token every 50 ms
  const auto start = TokenBucket::Clock::now();
  for (int i = 0; i < 4; ++i) bucket.Acquire();
  const auto elapsed = TokenBucket::Clock::now() - start;
  EXPECT_GE(elapsed, std::chrono::milliseconds(140));
}

}  // namespace
}  // namespace emostim
