#pragma once

#include <optional>
#include <string>
#include <vector>

#include "abctk/table_io.hpp"
#include "abctk/validation.hpp"
#include "config.hpp"

namespace abctk::cli {

/// Simulation tables of every model plus the observations, restricted to the statistics
/// used for inference (after matching and optional pruning).
struct Inputs {
    std::vector<SimulationTable> tables;
    std::vector<std::string> sim_names;
    std::vector<ObservedStats> obs;
    std::vector<std::string> stat_names;

    std::vector<const SimulationTable*> pointers() const;
};

/// Reads simName / params / obsName / maxReadSims and applies pruneCorrelatedStats / maxCor.
/// `require_obs` false lets obsName be omitted; every shared statistic is then used.
Inputs load_inputs(const Config& config, bool require_obs = true);

std::vector<std::string> split_list(const std::string& text, char sep);

ChoiceMethod choice_method(const Config& config);

/// Tolerance of rejection model choice: `tolerance` when set, else numRetained over the
/// smallest table.
double rejection_tolerance(std::optional<double> tolerance, std::size_t num_retained, const Inputs& in);

}  // namespace abctk::cli
