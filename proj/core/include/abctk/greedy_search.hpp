#pragma once

#include <string>
#include <vector>

#include "abctk/validation.hpp"

namespace abctk {

struct GreedyOptions {
    ModelChoiceValidationOptions validation;
    double max_cor = 1.0;            // maxCorSSFinder
    double min_improvement = 0.005;  // stop when the best addition gains less power
};

struct SubsetPower {
    std::vector<std::string> stats;
    double power = 0.0;
    double max_pairwise_cor = 0.0;
};

/// Greedy forward search for the statistic subset that best separates the models.
/// Power is the overall accuracy of leave-one-out model choice on the subset. Every
/// evaluated subset is returned, sorted by power (descending) then size (ascending).
std::vector<SubsetPower> greedy_search(const std::vector<const SimulationTable*>& tables,
                                       const std::vector<std::string>& candidates, const GreedyOptions& options);

}  // namespace abctk
