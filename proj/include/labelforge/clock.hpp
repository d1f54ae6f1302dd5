#pragma once

#include <chrono>
#include <cstdint>
#include <mutex>
#include <string>

namespace labelforge {

/// Time source for rate limiting, backoff and timestamps. Tests swap in a
/// virtual clock so no real time passes.
class Clock {
 public:
  using Duration = std::chrono::milliseconds;
  using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

  virtual ~Clock() = default;
  virtual TimePoint now() = 0;
  virtual void sleep_for(Duration duration) = 0;
  /// Wall-clock timestamp, ISO-8601 UTC.
  virtual std::string timestamp() = 0;
};

class SystemClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_for(Duration duration) override;
  std::string timestamp() override;
};

/// Manually advanced clock; sleeping advances it instantly. Timestamps are
/// derived from virtual time, so runs on a fresh VirtualClock are
/// reproducible.
class VirtualClock final : public Clock {
 public:
  TimePoint now() override;
  void sleep_for(Duration duration) override;
  std::string timestamp() override;

  void advance(Duration duration);
  Duration total_slept() const;

 private:
  mutable std::mutex mutex_;
  Duration elapsed_{0};
  Duration slept_{0};
};

std::string format_utc(std::int64_t unix_ms);

}  // namespace labelforge
