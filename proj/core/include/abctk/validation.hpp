#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abctk/glm.hpp"
#include "abctk/model_choice.hpp"
#include "abctk/random.hpp"
#include "abctk/rejection.hpp"
#include "abctk/stats.hpp"

namespace abctk {

struct FitPValues {
    std::optional<double> marginal_density;
    std::optional<double> marginal_density_pvalue;
    std::optional<double> tukey_depth;
    std::optional<double> tukey_pvalue;
    std::size_t n_check = 0;
};

/// Fraction of the first `n_check` retained simulations whose marginal density, under the
/// same fit, is at most that of `obs`. `obs_density` receives the density of `obs`.
double marginal_density_pvalue(const GlmFit& fit, const RetainedSet& retained, const Eigen::VectorXd& obs,
                               std::size_t n_check, double dirac_peak_width, double* obs_density = nullptr);

/// `count` random unit vectors in `dim` dimensions.
Eigen::MatrixXd random_directions(Eigen::Index dim, std::size_t count, Rng& rng);

/// Tukey depth of every query row within `points`, approximated over the given directions
/// (columns of `directions`): min over u of min(#{u.p <= u.q}, #{u.p >= u.q}) / n, capped at 0.5.
std::vector<double> tukey_depths(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries,
                                 const Eigen::MatrixXd& directions);

/// Fraction of the first `n_check` points whose depth is at most the depth of `obs`.
double tukey_pvalue(const Eigen::MatrixXd& points, const Eigen::VectorXd& obs, std::size_t n_check,
                    std::size_t projections, Rng& rng, double* obs_depth = nullptr);

enum class ValidationMode { random, retained };

struct ValidationOptions {
    ValidationMode mode = ValidationMode::random;
    std::size_t n_val = 100;
    RetainOptions retain;  // count or tolerance, standardize flag
    GlmSettings glm;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct ValidationRow {
    std::size_t row = 0;  // pseudo-observed row of the table
    std::vector<double> truth;
    std::vector<double> mode, mean, median, quantile, hdi;
    bool ok = true;
    std::string error;
};

/// Leave-one-out validation: each pseudo-observed row is removed from the table, the
/// estimation is rerun on the remainder and the truth is located in the posterior.
/// In retained mode pseudo-observations are drawn among the simulations retained for `obs`.
std::vector<ValidationRow> cross_validate(const SimulationTable& table, const ObservedStats& obs,
                                          const ValidationOptions& options);

/// Header and numeric payload for a RandomValidation / RetainedValidation file.
std::vector<std::string> validation_header(const std::vector<std::string>& param_names);
Eigen::MatrixXd validation_matrix(const std::vector<ValidationRow>& rows);

struct Coverage {
    std::string param;
    stats::KsResult quantile;
    stats::KsResult hdi;
};

/// KS tests of uniformity for the quantile and HDI columns of every parameter.
std::vector<Coverage> coverage_tests(const std::vector<ValidationRow>& rows, const std::vector<std::string>& param_names);

enum class ChoiceMethod { rejection, glm };

struct ModelChoiceValidationOptions {
    ChoiceMethod method = ChoiceMethod::glm;
    double tolerance = 0.01;  // rejection
    std::size_t count = 100;  // glm
    double dirac_peak_width = 0.1;
    std::size_t n_val = 100;  // pseudo-observations per model
    std::vector<double> prior;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct ModelChoiceValidationRow {
    std::size_t true_model = 0;
    std::size_t row = 0;
    std::vector<double> probabilities;
    std::size_t chosen = 0;
    bool ok = true;
};

struct ConfusionMatrix {
    Eigen::MatrixXd counts;  // true model x chosen model
    std::vector<double> accuracy;
    double overall = 0.0;
};

struct ModelChoiceValidation {
    std::vector<ModelChoiceValidationRow> rows;
    ConfusionMatrix confusion;
};

/// Draws `n_val` simulations per model as pseudo-observations (leave-one-out), repeats the
/// model choice on the statistics named in `stats` and tabulates which model wins.
ModelChoiceValidation model_choice_validate(const std::vector<const SimulationTable*>& tables,
                                            const std::vector<std::string>& stats,
                                            const ModelChoiceValidationOptions& options);

ConfusionMatrix confusion_matrix(const std::vector<ModelChoiceValidationRow>& rows, std::size_t models);

struct CalibrationBin {
    double lower = 0.0;
    double upper = 0.0;
    std::size_t count = 0;
    double mean_p_abc = 0.0;   // NaN for empty bins
    double p_empirical = 0.0;  // NaN for empty bins
};

/// Equal-width bins of the posterior probability of `model`; p_empirical is the share of
/// rows in the bin that were generated under `model`.
std::vector<CalibrationBin> calibration_curve(const std::vector<ModelChoiceValidationRow>& rows, std::size_t model,
                                              std::size_t bins = 10);

}  // namespace abctk
