#include "abctk/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace abctk::log {
namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& current_sink() {
    static Sink sink = [](Level level, std::string_view message) {
        const char* tag = level == Level::warning ? "[abctk] warning: " : level == Level::error ? "[abctk] error: " : "[abctk] ";
        std::cerr << tag << message << '\n';
    };
    return sink;
}

std::atomic<bool> quiet_flag{false};

void emit(Level level, std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(level, message);
}

}  // namespace

Sink set_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    Sink previous = std::move(current_sink());
    current_sink() = std::move(sink);
    return previous;
}

void info(std::string_view message) {
    if (!quiet_flag.load()) emit(Level::info, message);
}

void warn(std::string_view message) { emit(Level::warning, message); }

void error(std::string_view message) { emit(Level::error, message); }

void set_quiet(bool quiet) { quiet_flag.store(quiet); }

}  // namespace abctk::log
