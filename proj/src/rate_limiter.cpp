#include "labelforge/rate_limiter.hpp"

#include <stdexcept>

namespace labelforge {

namespace {
constexpr Clock::Duration kWindow{60000};
}

RateLimiter::RateLimiter(int per_minute, Clock& clock) : per_minute_(per_minute), clock_(clock) {
  if (per_minute < 1) throw std::invalid_argument("requests_per_minute must be at least 1");
}

Clock::TimePoint RateLimiter::acquire() {
  // Holding the lock while sleeping keeps admissions in FIFO order.
  std::lock_guard lock(mutex_);
  while (true) {
    const auto now = clock_.now();
    while (!starts_.empty() && now - starts_.front() >= kWindow) starts_.pop_front();
    if (static_cast<int>(starts_.size()) < per_minute_) {
      starts_.push_back(now);
      return now;
    }
    clock_.sleep_for(starts_.front() + kWindow - now);
  }
}

}  // namespace labelforge
