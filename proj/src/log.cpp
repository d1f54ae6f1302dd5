#include "labelforge/log.hpp"

#include <iostream>
#include <mutex>

namespace labelforge::log {
namespace {

std::mutex& sink_mutex() {
  static std::mutex mutex;
  return mutex;
}

Sink& sink() {
  static Sink current = [](Level level, std::string_view message) {
    static constexpr const char* kNames[] = {"info", "warning", "error"};
    std::cerr << "[" << kNames[static_cast<int>(level)] << "] " << message << '\n';
  };
  return current;
}

}  // namespace

void set_sink(Sink replacement) {
  std::lock_guard lock(sink_mutex());
  sink() = std::move(replacement);
}

void write(Level level, std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink()) sink()(level, message);
}

}  // namespace labelforge::log
