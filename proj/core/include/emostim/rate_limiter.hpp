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

#include <chrono>
#include <mutex>

namespace emostim {

/// Token bucket admitting at most `requests_per_minute` on average with a
/// burst of `burst` requests. A rate of 0 disables limiting.
class TokenBucket {
 public:
  using Clock = std::chrono::steady_clock;

  explicit TokenBucket(double requests_per_minute, double burst = 1.0);

  /// Blocks until a token is available, then consumes it.
  void Acquire();
  /// Consumes a token if one is available right now.
  bool TryAcquire();

  double requests_per_minute() const { return rate_per_minute_; }

 private:
  void RefillLocked(Clock::time_point now);

  const double rate_per_minute_;
  const double burst_;
  double tokens_;
  Clock::time_point last_refill_;
  std::mutex mu_;
};

}  // namespace emostim
