#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abctk/table_io.hpp"

namespace abctk {

/// Statistic columns of a table that are compared against an observation.
struct StatMatch {
    std::vector<std::string> names;
    std::vector<std::size_t> columns;  // table column of each name
    Eigen::VectorXd obs;               // raw observed values, same order
};

/// Pairs every observed statistic with its table column. Observed names missing from the
/// table are skipped with a warning; no overlap at all is a ConfigError.
StatMatch match_stats(const SimulationTable& table, const ObservedStats& obs);

/// Copies `columns` of the table into a dense matrix.
Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& values, const std::vector<std::size_t>& columns);

/// Per-statistic mean and standard deviation over a simulation set.
struct Standardizer {
    std::vector<std::string> names;  // statistics that take part in the distance
    std::vector<std::size_t> kept;   // positions of those statistics in the fitted input
    Eigen::VectorXd center;
    Eigen::VectorXd scale;

    /// Fits on `stats` (rows = simulations). Zero-variance statistics are dropped with a
    /// warning when they equal `obs`, and raise ConfigError otherwise. Row `exclude` is ignored.
    static Standardizer fit(const Eigen::MatrixXd& stats, const std::vector<std::string>& names,
                            const Eigen::VectorXd& obs, std::optional<std::size_t> exclude = std::nullopt);

    /// Identity transform over every statistic (standardizeStats disabled).
    static Standardizer identity(const std::vector<std::string>& names);

    Eigen::MatrixXd apply(const Eigen::MatrixXd& stats) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& obs) const;
};

/// The simulations closest to the observation, in ascending distance order.
struct RetainedSet {
    std::vector<std::size_t> indices;  // rows of the source table
    std::vector<double> distances;
    double epsilon = 0.0;

    std::vector<std::string> param_names;
    std::vector<std::string> stat_names;
    Eigen::MatrixXd params;  // retained x params, raw scale
    Eigen::MatrixXd stats;   // retained x stats, standardized
    Eigen::VectorXd obs;     // standardized observation
    Eigen::VectorXd param_lower;  // over the whole table
    Eigen::VectorXd param_upper;
    std::size_t total_rows = 0;

    std::size_t size() const { return indices.size(); }
    double acceptance_fraction() const {
        return total_rows ? static_cast<double>(indices.size()) / static_cast<double>(total_rows) : 0.0;
    }
};

struct RetainOptions {
    std::optional<std::size_t> count;    // numRetained
    std::optional<double> tolerance;     // tol; count = ceil(tol * rows)
    std::optional<std::size_t> exclude;  // leave-one-out row
    bool standardize = true;
    /// Fixed transform (e.g. pooled over several models); fitted on the table when empty.
    const Standardizer* standardizer = nullptr;
};

std::size_t retain_count(const RetainOptions& options, std::size_t rows);

/// Indices of the k smallest distances; ties keep the lower row index first.
std::vector<std::size_t> k_smallest(const std::vector<double>& distances, std::size_t k);

/// Euclidean distance of every row of `stats` to `obs`.
std::vector<double> distances_to(const Eigen::MatrixXd& stats, const Eigen::VectorXd& obs);

RetainedSet retain(const SimulationTable& table, const ObservedStats& obs, const RetainOptions& options);

/// Same as above with the observation given as raw values over `match`.
RetainedSet retain(const SimulationTable& table, const StatMatch& match, const RetainOptions& options);

/// Greedy pass in column order keeping statistics whose |r| with every kept one is at most
/// `max_cor`. Returns positions into the columns of `stats`.
std::vector<std::size_t> prune_correlated(const Eigen::MatrixXd& stats, double max_cor);

/// Retained rows of the table followed by a `distance` column (BestSimsParamStats).
SimulationTable retained_rows(const SimulationTable& table, const RetainedSet& retained);

}  // namespace abctk
