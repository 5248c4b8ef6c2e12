#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abctk/table_io.hpp"

namespace abctk {

/// Appends every product `<a>_X_<b>` (a <= b, original order) of the statistic columns.
SimulationTable boost(const SimulationTable& table);
ObservedStats boost(const ObservedStats& obs);
std::vector<std::string> boosted_names(const std::vector<std::string>& names);

/// Box-Cox normalization of one statistic, as stored in a linear-combination file.
///
/// x' = 1 + (x - min) / (max - min); bc = (x'^lambda - 1) / (lambda * gm^(lambda - 1))
/// (gm * log x' for lambda = 0); z = (bc - mean) / sd.
struct BoxCoxSpec {
    double max = 1.0;
    double min = 0.0;
    double lambda = 1.0;
    double gm = 1.0;
    double mean = 0.0;
    double sd = 1.0;

    /// Box-Cox value of x; NaN outside the domain (x' <= 0).
    double box_cox(double x) const;
    double standardize(double x, bool do_box_cox) const;
};

/// Statistic names, their normalization and a loading matrix (statistics x components).
struct LinearCombDef {
    std::vector<std::string> names;
    std::vector<BoxCoxSpec> box_cox;
    Eigen::MatrixXd loadings;

    std::size_t components() const { return static_cast<std::size_t>(loadings.cols()); }
};

/// One row per statistic: `name max min lambda gm mean sd loading_1 ... loading_k`.
LinearCombDef parse_linear_comb(std::istream& in, const std::string& source);
LinearCombDef read_linear_comb(const std::filesystem::path& path);
void write_linear_comb(std::ostream& out, const LinearCombDef& def);

std::vector<std::string> linear_comb_names(std::size_t k);

/// Component scores of the rows of `stats`, whose columns follow `def.names`.
Eigen::MatrixXd linear_comb_scores(const Eigen::MatrixXd& stats, const LinearCombDef& def, std::size_t k,
                                   bool do_box_cox, const std::string& source = "input");

/// Replaces the definition's statistics by LinearCombination_1..k; other columns pass through
/// first, in their original order. Parameter columns are preserved by name.
SimulationTable transform(const SimulationTable& table, const LinearCombDef& def, std::size_t k, bool do_box_cox);
ObservedStats transform(const ObservedStats& obs, const LinearCombDef& def, std::size_t k, bool do_box_cox);

/// Profile-likelihood Box-Cox fit on the grid -2, -1.9, ..., 2 (|lambda| < 0.05 snapped to 0),
/// with mean and sd of the transformed values.
BoxCoxSpec fit_box_cox(const Eigen::VectorXd& x);

/// NIPALS PLS2 on already centered and scaled matrices.
struct PlsModel {
    Eigen::MatrixXd weights;   // W: stats x k
    Eigen::MatrixXd x_loadings;  // P: stats x k
    Eigen::MatrixXd y_loadings;  // Q: params x k
    Eigen::MatrixXd rotation;    // R = W (P'W)^-1, so scores = X R
    Eigen::MatrixXd scores;      // T: rows x k
};

PlsModel nipals_pls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, std::size_t k);

struct PlsOptions {
    std::size_t max_components = 10;
    std::size_t folds = 10;
    bool box_cox = true;
    std::uint64_t seed = 0;
};

struct PlsResult {
    LinearCombDef def;
    Eigen::MatrixXd rmsep;  // components (1..k) x params, raw parameter scale
    std::size_t recommended = 1;
    std::vector<std::string> param_names;
};

/// Fits linear combinations of the statistic columns of `table` predicting its parameters,
/// with the cross-validated prediction error for every component count.
PlsResult fit_pls(const SimulationTable& table, const PlsOptions& options);

/// Smallest component count whose RMSEP is within 1% of the minimum for every parameter.
std::size_t recommend_components(const Eigen::MatrixXd& rmsep);

}  // namespace abctk
