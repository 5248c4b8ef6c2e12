#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abctk/est_model.hpp"
#include "abctk/random.hpp"
#include "abctk/table_io.hpp"

namespace abctk {

/// Statistics produced by one simulation.
struct SimOutput {
    std::vector<std::string> names;
    std::vector<double> values;
};

/// Anything that maps a parameter draw to statistics. `worker` identifies the calling
/// worker (0-based) so implementations can keep per-worker scratch state.
class Simulator {
  public:
    virtual ~Simulator() = default;
    virtual SimOutput simulate(const ParamDraw& params, Rng& rng, std::size_t worker) = 0;
    /// Maximum number of concurrent workers supported (0 = unlimited).
    virtual std::size_t max_workers() const { return 0; }
};

/// Wraps a callable; used for in-process models and tests.
class FunctionSimulator : public Simulator {
  public:
    using Fn = std::function<std::vector<double>(const ParamDraw&, Rng&)>;
    FunctionSimulator(std::vector<std::string> names, Fn fn) : names_(std::move(names)), fn_(std::move(fn)) {}
    SimOutput simulate(const ParamDraw& params, Rng& rng, std::size_t worker) override;

  private:
    std::vector<std::string> names_;
    Fn fn_;
};

enum class BindingMode { builtin, exec_args, exec_files, easyabc };

/// How simulations are produced; mirrors the simProgram / simArgs / simInputName /
/// sumStatProgram / sumStatArgs / sumStatName settings.
struct SimulatorBinding {
    BindingMode mode = BindingMode::builtin;
    std::string program;  // builtin name without the "builtin:" prefix, or an executable
    std::string args;     // template; parameter names are replaced by their values
    std::filesystem::path input_template;  // exec-files
    std::string post_program;
    std::string post_args;
    std::string stats_file = "summary_stats-temp.txt";
    std::vector<std::string> stat_names;   // easyabc output names (default stat_1..k)
    std::filesystem::path base_dir = ".";  // where relative programs and templates live
    std::filesystem::path scratch_dir;     // per-worker directories are created below it
};

/// Replaces every identifier-delimited occurrence of a parameter name by its value.
std::string render_template(const std::string& text, const ParamDraw& params);

/// Shortest decimal text that reads back as the same double.
std::string format_round_trip(double x);

/// Builtin models: "toy-normal", "toy-uniform", "sfs-neutral-growth".
std::unique_ptr<Simulator> make_builtin_simulator(const std::string& name, const std::string& args);
std::unique_ptr<Simulator> make_simulator(const SimulatorBinding& binding);

struct StandardRunOptions {
    std::size_t n_sims = 1000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    bool boosting = false;
};

struct StandardRunReport {
    std::size_t attempted = 0;
    std::size_t failed = 0;  // skipped after a retry
};

/// Prior simulation: one row per successful simulation with the output parameters followed
/// by the statistics. Simulation i draws from stream i of the seed, so results do not depend
/// on the thread count.
SimulationTable run_standard(const PriorSampler& sampler, Simulator& simulator, const StandardRunOptions& options,
                             StandardRunReport* report = nullptr);

/// Simulates with one retry; nullopt after two failures.
std::optional<SimOutput> simulate_with_retry(Simulator& simulator, const ParamDraw& params, Rng& rng,
                                             std::size_t worker);

}  // namespace abctk
