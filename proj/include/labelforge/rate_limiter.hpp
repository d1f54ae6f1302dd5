#pragma once

#include <deque>
#include <mutex>

#include "labelforge/clock.hpp"

namespace labelforge {

/// Sliding-window limiter: at most `per_minute` acquisitions start in any
/// 60 s window. acquire() blocks on the clock until a slot frees up.
class RateLimiter {
 public:
  RateLimiter(int per_minute, Clock& clock);

  /// Returns the time the caller was admitted.
  Clock::TimePoint acquire();

 private:
  int per_minute_;
  Clock& clock_;
  std::mutex mutex_;
  std::deque<Clock::TimePoint> starts_;
};

}  // namespace labelforge
