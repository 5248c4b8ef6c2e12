#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <unistd.h>

#include "abctk/error.hpp"
#include "abctk/est_model.hpp"
#include "abctk/log.hpp"
#include "abctk/mcmc.hpp"
#include "abctk/simulate.hpp"
#include "abctk/statselect.hpp"
#include "abctk/table_io.hpp"
#include "common.hpp"
#include "tasks.hpp"

namespace abctk::cli {

namespace {

SimulatorBinding read_binding(const Config& c) {
    SimulatorBinding b;
    const auto& program = c.required("simProgram");
    b.args = c.get("simArgs", "");
    if (program.rfind("builtin:", 0) == 0) {
        b.mode = BindingMode::builtin;
        b.program = program.substr(8);
        return b;
    }
    b.program = program;
    const auto protocol = c.get("simProtocol", "");
    if (protocol == "easyabc") {
        b.mode = BindingMode::easyabc;
    } else if (!protocol.empty()) {
        throw ConfigError("simProtocol must be easyabc, got '" + protocol + "'");
    } else if (c.has("simInputName")) {
        b.mode = BindingMode::exec_files;
        b.input_template = c.required("simInputName");
    } else {
        b.mode = BindingMode::exec_args;
    }
    b.post_program = c.get("sumStatProgram", "");
    b.post_args = c.get("sumStatArgs", "");
    b.stats_file = c.get("sumStatName", b.stats_file);
    b.base_dir = std::filesystem::current_path();
    return b;
}

void write_samples(const std::string& out_name, const SimulationTable& table) {
    const std::filesystem::path path = out_name + "_sampling1.txt";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    write_table(out, table.column_names, table.values);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    log::info("wrote " + std::to_string(table.rows()) + " rows to " + path.string());
}

/// Scratch directories of external simulators; removed at the end unless scratchDir was given.
class Scratch {
  public:
    Scratch(const Config& c, SimulatorBinding& b) {
        if (b.mode == BindingMode::builtin) return;
        if (c.has("scratchDir")) {
            b.scratch_dir = std::filesystem::absolute(c.required("scratchDir"));
            return;
        }
        owned_ = std::filesystem::temp_directory_path() / ("abctk-" + std::to_string(::getpid()));
        b.scratch_dir = owned_;
    }
    ~Scratch() {
        std::error_code ec;
        if (!owned_.empty()) std::filesystem::remove_all(owned_, ec);
    }
    Scratch(const Scratch&) = delete;
    Scratch& operator=(const Scratch&) = delete;

  private:
    std::filesystem::path owned_;
};

}  // namespace

void run_simulate(RunContext& ctx) {
    auto& c = ctx.config;
    const PriorSampler sampler(read_est(c.required("estName")));
    SimulatorBinding binding = read_binding(c);
    Scratch scratch(c, binding);
    auto simulator = make_simulator(binding);
    const auto out_name = c.get("outName", "ABC_out");
    const auto sampler_type = c.get("samplerType", "standard");

    if (sampler_type == "standard") {
        StandardRunOptions o;
        o.n_sims = c.count("numSims", 1000);
        o.seed = ctx.seed;
        o.threads = ctx.threads;
        o.boosting = c.flag("doBoosting");
        StandardRunReport report;
        const auto table = run_standard(sampler, *simulator, o, &report);
        log::info(std::to_string(report.attempted) + " simulations attempted, " + std::to_string(report.failed) +
                  " failed and skipped");
        write_samples(out_name, table);
        return;
    }
    if (sampler_type != "MCMC") {
        throw ConfigError("samplerType '" + sampler_type + "' is not supported (standard, MCMC)");
    }

    McmcConfig m;
    m.n_calibration = c.count("numCaliSims", 1000);
    m.threshold_prop = c.number("thresholdProp", 0.1);
    m.range_prop = c.number("rangeProp", 1.0);
    if (!(m.range_prop > 0)) throw ConfigError("rangeProp must be positive");
    const auto start = c.get("startingPoint", "best");
    if (start == "best") {
        m.start = StartingPoint::best;
    } else if (start == "random") {
        m.start = StartingPoint::random;
    } else {
        throw ConfigError("startingPoint must be best or random, got '" + start + "'");
    }
    m.sampling_interval = c.count("mcmcSampling", 1);
    if (m.sampling_interval == 0) throw ConfigError("mcmcSampling must be positive");
    m.chain_length = c.count("numSims", 1000);
    m.burn_in = c.number("burnin", 0.1);
    if (!(m.burn_in >= 0 && m.burn_in < 1)) throw ConfigError("burnin must be in [0, 1)");
    m.boosting = c.flag("doBoosting");
    if (c.has("linearCombName")) m.linear_comb = read_linear_comb(c.required("linearCombName"));
    m.num_linear_comb = c.count("numLinearComb", 0);
    m.do_box_cox = c.flag("doBoxCox");
    m.seed = ctx.seed;

    const auto obs = read_observed(c.required("obsName"));
    if (obs.empty()) throw IoError(c.required("obsName") + ": no observations");
    if (obs.size() > 1) log::warn("MCMC uses the first observation only");

    const auto calibration = calibrate(sampler, *simulator, obs[0], m);
    log::info("calibration: epsilon " + format_number(calibration.epsilon) + ", start distance " +
              format_number(calibration.start_distance));
    McmcReport report;
    const auto table = run_mcmc(sampler, *simulator, calibration, m, &report);
    log::info("chain: " + std::to_string(report.steps) + " steps, acceptance rate " + format_number(report.acceptance_rate()));
    write_samples(out_name, table);
}

}  // namespace abctk::cli
