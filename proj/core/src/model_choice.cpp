#include "abctk/model_choice.hpp"

#include <algorithm>
#include <cmath>

#include "abctk/error.hpp"
#include "abctk/stats.hpp"

namespace abctk {

void check_same_statistics(const std::vector<const SimulationTable*>& tables) {
    if (tables.empty()) throw ConfigError("model choice needs at least one simulation table");
    auto names_of = [](const SimulationTable& t) {
        auto names = t.stat_names();
        std::sort(names.begin(), names.end());
        return names;
    };
    const auto reference = names_of(*tables[0]);
    for (std::size_t m = 1; m < tables.size(); ++m) {
        if (names_of(*tables[m]) != reference) {
            throw ConfigError("simulation tables of model 0 and model " + std::to_string(m) +
                              " do not contain the same summary statistics");
        }
    }
}

Standardizer pooled_standardizer(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                 std::optional<Exclusion> exclude) {
    const StatMatch first = match_stats(*tables[0], obs);
    Eigen::Index rows = 0;
    for (const auto* t : tables) rows += static_cast<Eigen::Index>(t->rows());
    Eigen::MatrixXd pooled(rows, static_cast<Eigen::Index>(first.names.size()));
    Eigen::Index offset = 0;
    std::optional<std::size_t> pooled_exclude;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        const StatMatch match = m == 0 ? first : match_stats(*tables[m], obs);
        const auto n = static_cast<Eigen::Index>(tables[m]->rows());
        pooled.middleRows(offset, n) = gather_columns(tables[m]->values, match.columns);
        if (exclude && exclude->model == m) pooled_exclude = static_cast<std::size_t>(offset) + exclude->row;
        offset += n;
    }
    return Standardizer::fit(pooled, first.names, first.obs, pooled_exclude);
}

ModelChoiceResult finish_model_choice(std::vector<double> log_evidence, const std::vector<double>& prior) {
    const std::size_t k = log_evidence.size();
    if (!prior.empty() && prior.size() != k) throw ConfigError("model prior needs one weight per model");
    ModelChoiceResult out;
    out.log_evidence = log_evidence;
    Eigen::VectorXd weighted(static_cast<Eigen::Index>(k));
    for (std::size_t m = 0; m < k; ++m) {
        const double p = prior.empty() ? 1.0 : prior[m];
        out.evidence.push_back(std::exp(log_evidence[m]));
        weighted(static_cast<Eigen::Index>(m)) = log_evidence[m] + (p > 0.0 ? std::log(p) : -INFINITY);
    }
    const double norm = stats::log_sum_exp(weighted);
    if (!std::isfinite(norm)) throw NumericalError("every model has zero evidence");
    for (std::size_t m = 0; m < k; ++m) out.probabilities.push_back(std::exp(weighted(static_cast<Eigen::Index>(m)) - norm));
    out.bayes_factors.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            out.bayes_factors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                i == j ? 1.0 : std::exp(log_evidence[i] - log_evidence[j]);
        }
    }
    return out;
}

ModelChoiceResult rejection_model_choice(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                         double tolerance, const std::vector<double>& prior,
                                         std::optional<Exclusion> exclude) {
    check_same_statistics(tables);
    const Standardizer standardizer = pooled_standardizer(tables, obs, exclude);
    std::vector<double> distances;
    std::vector<std::size_t> owner;
    std::vector<std::size_t> sizes;
    Eigen::VectorXd obs_std;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        const StatMatch match = match_stats(*tables[m], obs);
        if (m == 0) obs_std = standardizer.apply(match.obs);
        const auto d = distances_to(standardizer.apply(gather_columns(tables[m]->values, match.columns)), obs_std);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const bool skip = exclude && exclude->model == m && exclude->row == i;
            distances.push_back(skip ? INFINITY : d[i]);
            owner.push_back(m);
        }
        sizes.push_back(tables[m]->rows() - (exclude && exclude->model == m ? 1 : 0));
    }
    RetainOptions options;
    options.tolerance = tolerance;
    const std::size_t total = distances.size() - (exclude ? 1 : 0);
    const std::size_t count = retain_count(options, total);
    std::vector<std::size_t> counts(tables.size(), 0);
    for (auto i : k_smallest(distances, count)) ++counts[owner[i]];

    std::vector<double> log_evidence;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        log_evidence.push_back(std::log(static_cast<double>(counts[m]) / static_cast<double>(sizes[m])));
    }
    // Evidence zero for every model cannot happen: at least one row is retained.
    ModelChoiceResult out = finish_model_choice(std::move(log_evidence), prior);
    out.retained_counts = counts;
    return out;
}

GlmModelChoice glm_model_choice(const std::vector<const SimulationTable*>& tables, const ObservedStats& obs,
                                std::size_t count, double dirac_peak_width, const std::vector<double>& prior,
                                std::optional<Exclusion> exclude) {
    check_same_statistics(tables);
    const Standardizer standardizer = pooled_standardizer(tables, obs, exclude);
    GlmModelChoice out;
    std::vector<double> log_evidence;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        RetainOptions options;
        options.count = count;
        options.standardizer = &standardizer;
        if (exclude && exclude->model == m) options.exclude = exclude->row;
        RetainedSet retained = retain(*tables[m], obs, options);
        GlmFit fit = glm_fit(retained);
        log_evidence.push_back(glm_log_marginal_density(fit, retained.obs, dirac_peak_width) +
                               std::log(retained.acceptance_fraction()));
        out.result.retained_counts.push_back(retained.size());
        out.retained.push_back(std::move(retained));
        out.fits.push_back(std::move(fit));
    }
    auto counts = out.result.retained_counts;
    out.result = finish_model_choice(std::move(log_evidence), prior);
    out.result.retained_counts = std::move(counts);
    return out;
}

}  // namespace abctk
