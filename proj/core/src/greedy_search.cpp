#include "abctk/greedy_search.hpp"

#include <algorithm>
#include <cmath>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/stats.hpp"

namespace abctk {

namespace {

/// Correlation matrix of the candidate statistics over all tables pooled.
Eigen::MatrixXd pooled_correlation(const std::vector<const SimulationTable*>& tables,
                                   const std::vector<std::string>& candidates) {
    Eigen::Index rows = 0;
    for (const auto* t : tables) rows += static_cast<Eigen::Index>(t->rows());
    Eigen::MatrixXd pooled(rows, static_cast<Eigen::Index>(candidates.size()));
    Eigen::Index offset = 0;
    for (const auto* t : tables) {
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            const auto c = t->column_index(candidates[j]);
            if (!c) throw ConfigError("statistic '" + candidates[j] + "' is missing from a simulation table");
            pooled.block(offset, static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(t->rows()), 1) =
                t->values.col(static_cast<Eigen::Index>(*c));
        }
        offset += static_cast<Eigen::Index>(t->rows());
    }
    return stats::correlation_matrix(pooled);
}

}  // namespace

std::vector<SubsetPower> greedy_search(const std::vector<const SimulationTable*>& tables,
                                       const std::vector<std::string>& candidates, const GreedyOptions& options) {
    if (tables.size() < 2) throw ConfigError("the statistic search needs simulations of at least two models");
    if (candidates.empty()) throw ConfigError("the statistic search needs at least one statistic");
    const Eigen::MatrixXd r = pooled_correlation(tables, candidates);
    auto abs_r = [&](std::size_t a, std::size_t b) {
        const double v = std::abs(r(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
        return std::isfinite(v) ? v : 0.0;
    };

    std::vector<SubsetPower> evaluated;
    auto evaluate = [&](const std::vector<std::size_t>& subset) {
        SubsetPower sp;
        for (auto i : subset) sp.stats.push_back(candidates[i]);
        for (std::size_t a = 0; a < subset.size(); ++a) {
            for (std::size_t b = a + 1; b < subset.size(); ++b) {
                sp.max_pairwise_cor = std::max(sp.max_pairwise_cor, abs_r(subset[a], subset[b]));
            }
        }
        sp.power = model_choice_validate(tables, sp.stats, options.validation).confusion.overall;
        log::info("power " + format_number(sp.power) + " for " + std::to_string(subset.size()) + " statistic(s)");
        evaluated.push_back(sp);
        return sp.power;
    };

    std::vector<std::size_t> current;
    double current_power = -1.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double power = evaluate({i});
        if (power > current_power) {
            current_power = power;
            current = {i};
        }
    }
    for (;;) {
        double best_power = -1.0;
        std::size_t best = candidates.size();
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (std::find(current.begin(), current.end(), i) != current.end()) continue;
            const bool too_correlated =
                std::any_of(current.begin(), current.end(), [&](std::size_t c) { return abs_r(c, i) > options.max_cor; });
            if (too_correlated) continue;
            auto subset = current;
            subset.push_back(i);
            std::sort(subset.begin(), subset.end());
            const double power = evaluate(subset);
            if (power > best_power) {
                best_power = power;
                best = i;
            }
        }
        if (best == candidates.size() || best_power - current_power < options.min_improvement) break;
        current.push_back(best);
        std::sort(current.begin(), current.end());
        current_power = best_power;
    }
    std::stable_sort(evaluated.begin(), evaluated.end(), [](const SubsetPower& a, const SubsetPower& b) {
        if (a.power != b.power) return a.power > b.power;
        return a.stats.size() < b.stats.size();
    });
    return evaluated;
}

}  // namespace abctk
