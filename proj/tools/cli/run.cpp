#include <string>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/random.hpp"
#include "tasks.hpp"

#ifndef ABCTK_VERSION
#define ABCTK_VERSION "unknown"
#endif

namespace abctk::cli {

int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 1;
    if (dynamic_cast<const IoError*>(&e)) return 2;
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const SimulatorError*>(&e)) return 4;
    return 1;
}

std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t component) { return make_stream(seed, component)(); }

int run(const std::vector<std::string>& args) {
    try {
        Config config = Config::from_args(args);
        log::set_quiet(config.flag("quiet"));
        const std::string task = config.required("task");
        RunContext ctx{config, config.seed(), static_cast<unsigned>(config.count("threads", 0))};

        log::info(std::string("abctk ") + ABCTK_VERSION);
        log::info("seed " + std::to_string(ctx.seed));
        for (const auto& [k, v] : config.entries()) log::info("  " + k + (v.empty() ? "" : " " + v));
        config.warn_unknown();

        if (task == "estimate") {
            run_estimate(ctx);
        } else if (task == "simulate") {
            run_simulate(ctx);
        } else if (task == "transform") {
            run_transform(ctx);
        } else if (task == "findStatsModelChoice") {
            run_find_stats(ctx);
        } else if (task == "findPLS") {
            run_find_pls(ctx);
        } else {
            throw ConfigError("unknown task '" + task + "' (estimate, simulate, transform, findStatsModelChoice, findPLS)");
        }
        return 0;
    } catch (const std::exception& e) {
        log::error(e.what());
        return exit_code(e);
    }
}

}  // namespace abctk::cli
