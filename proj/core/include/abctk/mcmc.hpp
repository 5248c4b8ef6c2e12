#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abctk/est_model.hpp"
#include "abctk/rejection.hpp"
#include "abctk/simulate.hpp"
#include "abctk/statselect.hpp"

namespace abctk {

enum class StartingPoint { best, random };

struct McmcConfig {
    std::size_t n_calibration = 1000;   // numCaliSims
    double threshold_prop = 0.1;        // thresholdProp
    double range_prop = 1.0;            // rangeProp
    StartingPoint start = StartingPoint::best;
    std::size_t sampling_interval = 1;  // mcmcSampling
    std::size_t chain_length = 1000;    // numSims: steps of the chain
    double burn_in = 0.1;               // fraction of recorded samples discarded
    bool boosting = false;
    std::optional<LinearCombDef> linear_comb;
    std::size_t num_linear_comb = 0;    // 0 = every component of the definition
    bool do_box_cox = false;
    std::uint64_t seed = 0;
};

/// Statistic pipeline shared by calibration and chain: boosting, linear combinations,
/// matching against the observation and standardization.
struct StatPipeline {
    bool boosting = false;
    std::optional<LinearCombDef> linear_comb;
    std::size_t num_linear_comb = 0;
    bool do_box_cox = false;
    std::vector<std::string> names;  // statistics compared after the transforms
    Eigen::VectorXd obs;             // standardized observation
    Standardizer standardizer;

    /// Transformed statistics in `names` order (before standardization).
    Eigen::VectorXd transform(const SimOutput& out) const;
    double distance(const SimOutput& out) const;
};

struct Calibration {
    double epsilon = 0.0;
    Eigen::VectorXd widths;   // proposal half-width per prior (0 for fixed priors)
    std::vector<double> start_raw;
    double start_distance = 0.0;
    SimOutput start_stats;
    StatPipeline pipeline;
    std::size_t simulations = 0;
};

Calibration calibrate(const PriorSampler& sampler, Simulator& simulator, const ObservedStats& obs,
                      const McmcConfig& config);

/// Proposal: uniform window of half-width w around `current`, reflected into [lower, upper].
double reflect(double x, double lower, double upper);

struct McmcReport {
    std::size_t steps = 0;
    std::size_t accepted = 0;
    std::size_t simulations = 0;
    double acceptance_rate() const { return steps ? static_cast<double>(accepted) / static_cast<double>(steps) : 0.0; }
};

/// Runs the chain from a calibration. Rows hold the output parameters, the simulated
/// statistics and the distance of every recorded state after burn-in.
SimulationTable run_mcmc(const PriorSampler& sampler, Simulator& simulator, const Calibration& calibration,
                         const McmcConfig& config, McmcReport* report = nullptr);

}  // namespace abctk
