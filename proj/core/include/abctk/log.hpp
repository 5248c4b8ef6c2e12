#pragma once

#include <functional>
#include <string_view>

namespace abctk::log {

enum class Level { info, warning, error };

using Sink = std::function<void(Level, std::string_view)>;

/// Replace the message sink (stderr by default). Returns the previous sink.
Sink set_sink(Sink sink);

void info(std::string_view message);
void warn(std::string_view message);
/// Fatal condition reported just before exiting; never silenced.
void error(std::string_view message);

/// Silence info messages; warnings still reach the sink.
void set_quiet(bool quiet);

}  // namespace abctk::log
