#pragma once

#include <functional>
#include <string_view>

namespace labelforge::log {

enum class Level { info, warning, error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replaces the process-wide sink (stderr by default). Passing an empty
/// function silences logging.
void set_sink(Sink sink);

void write(Level level, std::string_view message);
inline void info(std::string_view message) { write(Level::info, message); }
inline void warning(std::string_view message) { write(Level::warning, message); }
inline void error(std::string_view message) { write(Level::error, message); }

}  // namespace labelforge::log
