#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "abctk/error.hpp"
#include "abctk/model_choice.hpp"
#include "unit/fixtures.hpp"

using namespace abctk;

TEST_CASE("probabilities and Bayes factors from evidences") {
    const auto r = finish_model_choice({0.0, std::log(3.0)}, {});
    CHECK(r.probabilities[0] == doctest::Approx(0.25));
    CHECK(r.probabilities[1] == doctest::Approx(0.75));
    CHECK(r.bayes_factors(1, 0) == doctest::Approx(3.0));
    CHECK(r.bayes_factors(0, 1) == doctest::Approx(1.0 / 3));
    const auto p = finish_model_choice({0.0, std::log(3.0)}, {0.75, 0.25});
    CHECK(p.probabilities[0] == doctest::Approx(0.5));
    const auto tiny = finish_model_choice({-2000.0, -2001.0}, {});
    CHECK(tiny.probabilities[0] == doctest::Approx(std::exp(1.0) / (1 + std::exp(1.0))));
}

TEST_CASE("identical models are equally probable under rejection") {
    const auto a = fixture::linear_table(200, 1, 2, 0.3, 1);
    const ObservedStats obs{{"s1", "s2"}, {0.2, 0.1}};
    const auto r = rejection_model_choice({&a, &a}, obs, 0.05);
    CHECK(r.probabilities[0] == doctest::Approx(0.5));
    CHECK(r.retained_counts[0] == r.retained_counts[1]);
}

TEST_CASE("rejection corrects for table size") {
    const auto a = fixture::linear_table(200, 1, 2, 0.3, 2);
    auto doubled = a;
    doubled.values.resize(400, a.values.cols());
    doubled.values << a.values, a.values;
    const ObservedStats obs{{"s1", "s2"}, {0.2, 0.1}};
    const auto r = rejection_model_choice({&a, &doubled}, obs, 0.06);
    CHECK(r.retained_counts[1] == 2 * r.retained_counts[0]);
    CHECK(r.probabilities[0] == doctest::Approx(0.5));
}

TEST_CASE("model choice requires matching statistics") {
    const auto a = fixture::linear_table(50, 1, 2, 0.3, 3);
    const auto b = fixture::linear_table(50, 1, 3, 0.3, 3);
    CHECK_THROWS_AS(check_same_statistics({&a, &b}), ConfigError);
}

TEST_CASE("the GLM prefers the generating toy model") {
    const auto n = fixture::toy_table("toy-normal", 3000, 1);
    const auto u = fixture::toy_table("toy-uniform", 3000, 2);
    const auto obs = fixture::toy_obs();
    const auto glm = glm_model_choice({&n, &u}, obs, 100, 0.1);
    CHECK(glm.result.probabilities[0] > 0.95);
    CHECK(glm.retained.size() == 2);
    CHECK(glm.result.evidence[0] ==
          doctest::Approx(std::exp(glm.result.log_evidence[0])).epsilon(1e-9));
    const auto rej = rejection_model_choice({&n, &u}, obs, 0.1);
    CHECK(rej.probabilities[0] > 0.5);
    CHECK(rej.probabilities[0] + rej.probabilities[1] == doctest::Approx(1.0));
}

TEST_CASE("leave-one-out exclusion removes the row from the pooled standardizer") {
    const auto a = fixture::linear_table(100, 1, 2, 0.3, 4);
    const ObservedStats obs{{"s1", "s2"}, {a.values(3, 1), a.values(3, 2)}};
    const auto full = pooled_standardizer({&a}, obs);
    const auto loo = pooled_standardizer({&a}, obs, Exclusion{0, 3});
    CHECK(full.center(0) != loo.center(0));
    auto without = a;
    without.values.row(3) = without.values.row(99);
    without.values.conservativeResize(99, Eigen::NoChange);
    const auto direct = pooled_standardizer({&without}, obs);
    CHECK(loo.center(0) == doctest::Approx(direct.center(0)));
    CHECK(loo.scale(1) == doctest::Approx(direct.scale(1)));
}

namespace {

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Evidence of s under theta ~ U(lo, hi), s | theta ~ N(theta, 1).
double location_evidence(double s, double lo, double hi) { return (phi_cdf(s - lo) - phi_cdf(s - hi)) / (hi - lo); }

}  // namespace

TEST_CASE("GLM Bayes factor tracks the analytic ratio") {
    const auto a = fixture::location_table(10000, -5.0, 5.0, 11);
    const auto b = fixture::location_table(10000, 0.0, 10.0, 12);
    for (double s : {-1.0, 0.5, 2.0}) {
        const ObservedStats obs{{"s"}, {s}};
        const auto choice = glm_model_choice({&a, &b}, obs, 10000, 0.01);
        const double expected = location_evidence(s, -5, 5) / location_evidence(s, 0, 10);
        CAPTURE(s);
        CHECK(choice.result.bayes_factors(0, 1) == doctest::Approx(expected).epsilon(0.2));
    }
}

TEST_CASE("model probabilities are invariant to affine maps of the statistics") {
    const auto a = fixture::location_table(2000, -5.0, 5.0, 21);
    const auto b = fixture::location_table(2000, 0.0, 10.0, 22);
    const ObservedStats obs{{"s"}, {0.5}};
    auto shift = [](SimulationTable t, ObservedStats o) {
        for (std::size_t c = 0; c < t.column_names.size(); ++c) {
            if (std::find(t.param_columns.begin(), t.param_columns.end(), c) != t.param_columns.end()) continue;
            t.values.col(static_cast<Eigen::Index>(c)) = t.values.col(static_cast<Eigen::Index>(c)).array() * 3.5 - 7.0;
        }
        for (auto& v : o.values) v = v * 3.5 - 7.0;
        return std::pair{t, o};
    };
    const auto [a2, obs2] = shift(a, obs);
    const auto [b2, unused] = shift(b, obs);
    const auto before = glm_model_choice({&a, &b}, obs, 200, 0.1).result.probabilities;
    const auto after = glm_model_choice({&a2, &b2}, obs2, 200, 0.1).result.probabilities;
    CHECK(before[0] > 0.2);
    CHECK(before[0] < 0.8);
    CHECK(after[0] == doctest::Approx(before[0]).epsilon(1e-6));
    const auto rb = rejection_model_choice({&a, &b}, obs, 0.1).probabilities;
    const auto ra = rejection_model_choice({&a2, &b2}, obs2, 0.1).probabilities;
    CHECK(ra[0] == doctest::Approx(rb[0]).epsilon(1e-9));
}
