#include "abctk/rejection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/stats.hpp"

namespace abctk {

StatMatch match_stats(const SimulationTable& table, const ObservedStats& obs) {
    StatMatch match;
    const auto params = table.param_columns;
    std::vector<double> values;
    for (std::size_t i = 0; i < obs.names.size(); ++i) {
        const auto col = table.column_index(obs.names[i]);
        if (!col || std::find(params.begin(), params.end(), *col) != params.end()) {
            log::warn("observed statistic '" + obs.names[i] + "' is not a statistic of the simulation table; ignored");
            continue;
        }
        match.names.push_back(obs.names[i]);
        match.columns.push_back(*col);
        values.push_back(obs.values[i]);
    }
    if (match.names.empty()) {
        throw ConfigError("no statistic of the observed data matches a column of the simulation table");
    }
    match.obs = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    return match;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& values, const std::vector<std::size_t>& columns) {
    Eigen::MatrixXd out(values.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t j = 0; j < columns.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = values.col(static_cast<Eigen::Index>(columns[j]));
    return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& stats, const std::vector<std::string>& names,
                               const Eigen::VectorXd& obs, std::optional<std::size_t> exclude) {
    const Eigen::Index n = stats.rows();
    const double used = static_cast<double>(n - (exclude ? 1 : 0));
    if (used < 2) throw ConfigError("standardizing statistics needs at least two simulations");
    Standardizer out;
    std::vector<double> centers, scales;
    for (Eigen::Index j = 0; j < stats.cols(); ++j) {
        auto col = stats.col(j);
        double sum = col.sum();
        if (exclude) sum -= col(static_cast<Eigen::Index>(*exclude));
        const double mean = sum / used;
        double ss = (col.array() - mean).square().sum();
        if (exclude) ss -= std::pow(col(static_cast<Eigen::Index>(*exclude)) - mean, 2);
        const double sd = std::sqrt(std::max(ss, 0.0) / (used - 1.0));
        if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
            if (std::abs(obs(j) - mean) <= 1e-12 * std::max(1.0, std::abs(mean))) {
                log::warn("statistic '" + names[j] + "' is constant and equal to the observation; excluded");
                continue;
            }
            throw ConfigError("statistic '" + names[j] + "' is constant at " + format_number(mean) +
                              " in the simulations but observed at " + format_number(obs(j)));
        }
        out.names.push_back(names[j]);
        out.kept.push_back(static_cast<std::size_t>(j));
        centers.push_back(mean);
        scales.push_back(sd);
    }
    if (out.kept.empty()) throw ConfigError("every statistic is constant; nothing to compare");
    out.center = Eigen::Map<Eigen::VectorXd>(centers.data(), static_cast<Eigen::Index>(centers.size()));
    out.scale = Eigen::Map<Eigen::VectorXd>(scales.data(), static_cast<Eigen::Index>(scales.size()));
    return out;
}

Standardizer Standardizer::identity(const std::vector<std::string>& names) {
    Standardizer out;
    out.names = names;
    out.kept.resize(names.size());
    std::iota(out.kept.begin(), out.kept.end(), std::size_t{0});
    out.center = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(names.size()));
    out.scale = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(names.size()));
    return out;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& stats) const {
    Eigen::MatrixXd out = gather_columns(stats, kept);
    out.rowwise() -= center.transpose();
    out.array().rowwise() /= scale.transpose().array();
    return out;
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& obs) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(kept.size()));
    for (std::size_t j = 0; j < kept.size(); ++j) {
        const auto i = static_cast<Eigen::Index>(j);
        out(i) = (obs(static_cast<Eigen::Index>(kept[j])) - center(i)) / scale(i);
    }
    return out;
}

std::size_t retain_count(const RetainOptions& options, std::size_t rows) {
    std::size_t count = 0;
    if (options.count) {
        count = *options.count;
    } else if (options.tolerance) {
        if (!(*options.tolerance > 0.0 && *options.tolerance <= 1.0)) {
            throw ConfigError("tolerance must lie in (0, 1]");
        }
        count = static_cast<std::size_t>(std::ceil(*options.tolerance * static_cast<double>(rows) - 1e-9));
    } else {
        throw ConfigError("either a retention count or a tolerance is required");
    }
    if (count == 0) throw ConfigError("number of simulations to retain must be positive");
    if (count > rows) {
        throw ConfigError("cannot retain " + std::to_string(count) + " of " + std::to_string(rows) + " simulations");
    }
    return count;
}

std::vector<std::size_t> k_smallest(const std::vector<double>& distances, std::size_t k) {
    std::vector<std::size_t> order(distances.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    k = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          return distances[a] < distances[b] || (distances[a] == distances[b] && a < b);
                      });
    order.resize(k);
    return order;
}

std::vector<double> distances_to(const Eigen::MatrixXd& stats, const Eigen::VectorXd& obs) {
    std::vector<double> d(static_cast<std::size_t>(stats.rows()));
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        d[static_cast<std::size_t>(i)] = (stats.row(i).transpose() - obs).norm();
    }
    return d;
}

RetainedSet retain(const SimulationTable& table, const ObservedStats& obs, const RetainOptions& options) {
    return retain(table, match_stats(table, obs), options);
}

RetainedSet retain(const SimulationTable& table, const StatMatch& match, const RetainOptions& options) {
    const std::size_t rows = table.rows() - (options.exclude ? 1 : 0);
    const std::size_t count = retain_count(options, rows);
    const Eigen::MatrixXd raw = gather_columns(table.values, match.columns);

    Standardizer fitted;
    if (!options.standardizer) {
        fitted = options.standardize ? Standardizer::fit(raw, match.names, match.obs, options.exclude)
                                     : Standardizer::identity(match.names);
    }
    const Standardizer& standardizer = options.standardizer ? *options.standardizer : fitted;
    const Eigen::MatrixXd std_stats = standardizer.apply(raw);
    const Eigen::VectorXd std_obs = standardizer.apply(match.obs);

    std::vector<double> distances = distances_to(std_stats, std_obs);
    if (options.exclude) distances[*options.exclude] = std::numeric_limits<double>::infinity();

    RetainedSet out;
    out.indices = k_smallest(distances, count);
    out.distances.reserve(count);
    for (auto i : out.indices) out.distances.push_back(distances[i]);
    out.epsilon = out.distances.back();
    out.param_names = table.param_names();
    out.stat_names = standardizer.names;
    out.obs = std_obs;
    out.total_rows = rows;

    const Eigen::MatrixXd params = gather_columns(table.values, table.param_columns);
    const auto n = static_cast<Eigen::Index>(count);
    out.params.resize(n, params.cols());
    out.stats.resize(n, std_stats.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto src = static_cast<Eigen::Index>(out.indices[static_cast<std::size_t>(r)]);
        out.params.row(r) = params.row(src);
        out.stats.row(r) = std_stats.row(src);
    }
    out.param_lower.resize(params.cols());
    out.param_upper.resize(params.cols());
    for (Eigen::Index j = 0; j < params.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (Eigen::Index r = 0; r < params.rows(); ++r) {
            if (options.exclude && static_cast<std::size_t>(r) == *options.exclude) continue;
            lo = std::min(lo, params(r, j));
            hi = std::max(hi, params(r, j));
        }
        out.param_lower(j) = lo;
        out.param_upper(j) = hi;
    }
    return out;
}

std::vector<std::size_t> prune_correlated(const Eigen::MatrixXd& stats, double max_cor) {
    std::vector<std::size_t> kept;
    if (max_cor >= 1.0) {
        kept.resize(static_cast<std::size_t>(stats.cols()));
        std::iota(kept.begin(), kept.end(), std::size_t{0});
        return kept;
    }
    const Eigen::MatrixXd r = stats::correlation_matrix(stats);
    for (Eigen::Index j = 0; j < stats.cols(); ++j) {
        const bool correlated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return std::abs(r(j, static_cast<Eigen::Index>(k))) > max_cor;
        });
        if (!correlated) kept.push_back(static_cast<std::size_t>(j));
    }
    return kept;
}

SimulationTable retained_rows(const SimulationTable& table, const RetainedSet& retained) {
    SimulationTable out;
    out.column_names = table.column_names;
    out.column_names.push_back("distance");
    out.param_columns = table.param_columns;
    out.values.resize(static_cast<Eigen::Index>(retained.size()), table.values.cols() + 1);
    for (std::size_t r = 0; r < retained.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        out.values.row(i).head(table.values.cols()) = table.values.row(static_cast<Eigen::Index>(retained.indices[r]));
        out.values(i, table.values.cols()) = retained.distances[r];
    }
    return out;
}

}  // namespace abctk
