#include "labelforge/clock.hpp"

#include <ctime>
#include <thread>

namespace labelforge {

std::string format_utc(std::int64_t unix_ms) {
  const std::time_t seconds = static_cast<std::time_t>(unix_ms / 1000);
  std::tm tm{};
  gmtime_r(&seconds, &tm);
  char buffer[40];
  const auto n = std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%S", &tm);
  char millis[8];
  std::snprintf(millis, sizeof millis, ".%03dZ", static_cast<int>(unix_ms % 1000));
  return std::string(buffer, n) + millis;
}

Clock::TimePoint SystemClock::now() {
  return std::chrono::time_point_cast<Duration>(std::chrono::steady_clock::now());
}

void SystemClock::sleep_for(Duration duration) { std::this_thread::sleep_for(duration); }

std::string SystemClock::timestamp() {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  return format_utc(ms);
}

Clock::TimePoint VirtualClock::now() {
  std::lock_guard lock(mutex_);
  return TimePoint(elapsed_);
}

void VirtualClock::sleep_for(Duration duration) {
  std::lock_guard lock(mutex_);
  if (duration.count() > 0) {
    elapsed_ += duration;
    slept_ += duration;
  }
}

std::string VirtualClock::timestamp() {
  std::lock_guard lock(mutex_);
  return format_utc(elapsed_.count());
}

void VirtualClock::advance(Duration duration) {
  std::lock_guard lock(mutex_);
  elapsed_ += duration;
}

Clock::Duration VirtualClock::total_slept() const {
  std::lock_guard lock(mutex_);
  return slept_;
}

}  // namespace labelforge
