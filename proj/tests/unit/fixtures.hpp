#pragma once

// Shared test inputs: toy prior tables and small synthetic tables.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "abctk/est_model.hpp"
#include "abctk/simulate.hpp"
#include "abctk/table_io.hpp"

namespace fixture {

inline abctk::SimulationTable toy_table(const std::string& model, std::size_t n, std::uint64_t seed) {
    abctk::PriorSampler sampler(abctk::read_est(ABCTK_TEST_DATA "/toy.est"));
    auto sim = abctk::make_builtin_simulator(model, "");
    return abctk::run_standard(sampler, *sim, {n, seed, 1, false});
}

inline abctk::ObservedStats toy_obs() { return abctk::read_observed(ABCTK_TEST_DATA "/normal.obs").front(); }

/// Rows of (params, stats) with stats = a + b * params + noise, for regression checks.
inline abctk::SimulationTable linear_table(std::size_t n, std::size_t params, std::size_t stats, double noise,
                                           std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> z;
    Eigen::MatrixXd coef(params, stats);
    for (Eigen::Index i = 0; i < coef.rows(); ++i)
        for (Eigen::Index j = 0; j < coef.cols(); ++j) coef(i, j) = u(rng) * 2.0;
    abctk::SimulationTable t;
    for (std::size_t p = 0; p < params; ++p) {
        t.column_names.push_back("p" + std::to_string(p + 1));
        t.param_columns.push_back(p);
    }
    for (std::size_t s = 0; s < stats; ++s) t.column_names.push_back("s" + std::to_string(s + 1));
    t.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(params + stats));
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
        Eigen::RowVectorXd theta(params);
        for (auto& v : theta) v = u(rng);
        t.values.row(r).head(params) = theta;
        Eigen::RowVectorXd s = theta * coef;
        for (auto& v : s) v += 0.5 + noise * z(rng);
        t.values.row(r).tail(stats) = s;
    }
    return t;
}

/// theta ~ U(lo, hi), s = theta + N(0, 1): closed-form evidence and posterior.
inline abctk::SimulationTable location_table(std::size_t n, double lo, double hi, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    std::normal_distribution<double> z;
    abctk::SimulationTable t;
    t.column_names = {"theta", "s"};
    t.param_columns = {0};
    t.values.resize(static_cast<Eigen::Index>(n), 2);
    for (Eigen::Index r = 0; r < t.values.rows(); ++r) {
        t.values(r, 0) = u(rng);
        t.values(r, 1) = t.values(r, 0) + z(rng);
    }
    return t;
}

inline abctk::ObservedStats observed(const std::vector<std::string>& names, const std::vector<double>& values) {
    return {names, values};
}

}  // namespace fixture
