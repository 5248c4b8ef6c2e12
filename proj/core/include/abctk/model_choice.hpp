#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "abctk/glm.hpp"
#include "abctk/rejection.hpp"
#include "abctk/table_io.hpp"

namespace abctk {

struct ModelChoiceResult {
    /// Acceptance fraction (rejection) or marginal density (GLM) per model.
    std::vector<double> evidence;
    std::vector<double> log_evidence;
    std::vector<double> probabilities;
    Eigen::MatrixXd bayes_factors;  // BF(i, j) = evidence i / evidence j
    std::vector<std::size_t> retained_counts;
};

/// A row withheld from one of the tables (leave-one-out validation).
struct Exclusion {
    std::size_t model = 0;
    std::size_t row = 0;
};

/// Throws ConfigError unless every table has the same statistic column names.
void check_same_statistics(const std::vector<const SimulationTable*>& tables);

/// Standardizer fitted on the rows of every table pooled together.
Standardizer pooled_standardizer(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                 std::optional<Exclusion> exclude = std::nullopt);

/// Posterior model probabilities from the share of each model among the jointly retained
/// ceil(tol * total) simulations, corrected for table size and weighted by the model prior.
ModelChoiceResult rejection_model_choice(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                         double tolerance, const std::vector<double>& prior = {},
                                         std::optional<Exclusion> exclude = std::nullopt);

struct GlmModelChoice {
    ModelChoiceResult result;
    std::vector<RetainedSet> retained;
    std::vector<GlmFit> fits;
};

/// Per model: retain `count` simulations under the pooled standardizer, fit the GLM and take
/// its marginal density times the acceptance fraction as the model evidence.
GlmModelChoice glm_model_choice(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                std::size_t count, double dirac_peak_width, const std::vector<double>& prior = {},
                                std::optional<Exclusion> exclude = std::nullopt);

/// Probabilities and Bayes factors from log evidences and a model prior (uniform when empty).
ModelChoiceResult finish_model_choice(std::vector<double> log_evidence, const std::vector<double>& prior);

}  // namespace abctk
