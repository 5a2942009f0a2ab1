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

#include "emostim/rate_limiter.hpp"

#include <algorithm>
#include <thread>

namespace emostim {

TokenBucket::TokenBucket(double requests_per_minute, double burst)
    : rate_per_minute_(std::max(0.0, requests_per_minute)),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_refill_(Clock::now()) {}

void TokenBucket::RefillLocked(Clock::time_point now) {
  const std::chrono::duration<double, std::ratio<60>> elapsed = now - last_refill_;
  tokens_ = std::min(burst_, tokens_ + elapsed.count() * rate_per_minute_);
  last_refill_ = now;
}

bool TokenBucket::TryAcquire() {
  if (rate_per_minute_ <= 0.0) return true;
  std::lock_guard lock(mu_);
  RefillLocked(Clock::now());
  if (tokens_ >= 1.0) {
    tokens_ -= 1.0;
    return true;
  }
  return false;
}

void TokenBucket::Acquire() {
  if (rate_per_minute_ <= 0.0) return;
  while (true) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mu_);
      RefillLocked(Clock::now());
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) * 60.0 / rate_per_minute_);
    }
    std::this_thread::sleep_for(wait);
  }
}

}  // namespace emostim
