#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

#include "config.hpp"

namespace abctk::cli {

struct RunContext {
    Config& config;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void run_estimate(RunContext& ctx);
void run_simulate(RunContext& ctx);
void run_transform(RunContext& ctx);
void run_find_stats(RunContext& ctx);
void run_find_pls(RunContext& ctx);

/// 0 success, 1 configuration, 2 I/O, 3 numerical, 4 simulator.
int exit_code(const std::exception& e);

/// Parses the arguments, logs the run header and dispatches on `task`.
/// Errors are reported as one line on the log and mapped to an exit code.
int run(const std::vector<std::string>& args);

/// Seed for one independent component of a run (validation, Tukey directions, ...).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t component);

}  // namespace abctk::cli
