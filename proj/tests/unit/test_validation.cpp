#include <doctest.h>

#include <random>

#include "abctk/validation.hpp"
#include "unit/fixtures.hpp"
#include "unit/oracles.hpp"

using namespace abctk;

TEST_CASE("projected Tukey depth is close to the exact 2-D depth") {
    std::mt19937_64 gen(13);
    std::normal_distribution<double> z;
    Eigen::MatrixXd pts(50, 2);
    for (auto& v : pts.reshaped()) v = z(gen);
    Rng rng(1);
    const auto dirs = random_directions(2, 1000, rng);
    const auto depth = tukey_depths(pts, pts, dirs);
    for (Eigen::Index i = 0; i < pts.rows(); ++i) {
        const double exact = oracle::tukey_depth_2d(pts, pts.row(i).transpose());
        CHECK(depth[static_cast<std::size_t>(i)] >= exact - 1e-12);
        CHECK(depth[static_cast<std::size_t>(i)] <= exact + 0.05);
    }
    const Eigen::MatrixXd far = Eigen::RowVector2d(10, 10);
    CHECK(tukey_depths(pts, far, dirs)[0] == 0.0);
}

TEST_CASE("random directions are unit vectors") {
    Rng rng(2);
    const auto d = random_directions(5, 100, rng);
    CHECK(d.rows() == 5);
    for (Eigen::Index k = 0; k < d.cols(); ++k) CHECK(d.col(k).norm() == doctest::Approx(1.0));
}

TEST_CASE("Tukey P-value: central observations are typical, outliers are not") {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> z;
    Eigen::MatrixXd pts(300, 3);
    for (auto& v : pts.reshaped()) v = z(gen);
    Rng rng(4);
    CHECK(tukey_pvalue(pts, Eigen::Vector3d::Zero(), 300, 500, rng) > 0.9);
    double depth = -1;
    CHECK(tukey_pvalue(pts, Eigen::Vector3d(5, 5, 5), 300, 500, rng, &depth) == 0.0);
    CHECK(depth == 0.0);
}

TEST_CASE("marginal density P-value counts retained simulations at most as likely") {
    const auto t = fixture::linear_table(1000, 2, 3, 0.2, 6);
    RetainOptions opt;
    opt.count = 100;
    const auto r = retain(t, ObservedStats{{"s1", "s2", "s3"}, {0.5, 0.5, 0.5}}, opt);
    const auto fit = glm_fit(r);
    double obs_density = 0;
    const double p = marginal_density_pvalue(fit, r, r.obs, 60, 0.1, &obs_density);
    CHECK(obs_density == doctest::Approx(glm_marginal_density(fit, r.obs, 0.1)));
    int below = 0;
    for (Eigen::Index i = 0; i < 60; ++i)
        below += glm_marginal_density(fit, r.stats.row(i).transpose(), 0.1) <= obs_density;
    CHECK(p == doctest::Approx(below / 60.0));
}

TEST_CASE("confusion matrix and calibration bins") {
    std::vector<ModelChoiceValidationRow> rows{
        {0, 0, {0.9, 0.1}, 0}, {0, 1, {0.45, 0.55}, 1}, {1, 2, {0.2, 0.8}, 1}, {1, 3, {0.95, 0.05}, 0},
        {1, 4, {0.15, 0.85}, 1}, {0, 5, {0.5, 0.5}, 0, false}};
    const auto c = confusion_matrix(rows, 2);
    CHECK(c.counts(0, 0) == 1);
    CHECK(c.counts(0, 1) == 1);
    CHECK(c.counts(1, 0) == 1);
    CHECK(c.counts(1, 1) == 2);
    CHECK(c.accuracy[0] == doctest::Approx(0.5));
    CHECK(c.accuracy[1] == doctest::Approx(2.0 / 3));
    CHECK(c.overall == doctest::Approx(0.6));
    const auto bins = calibration_curve(rows, 0, 10);
    CHECK(bins[9].count == 2);
    CHECK(bins[9].p_empirical == doctest::Approx(0.5));
    CHECK(bins[9].mean_p_abc == doctest::Approx(0.925));
    CHECK(bins[4].count == 1);
    CHECK(std::isnan(bins[5].p_empirical));
}

TEST_CASE("leave-one-out validation rows are well formed and reproducible") {
    const auto t = fixture::linear_table(800, 2, 3, 0.2, 7);
    const ObservedStats obs{{"s1", "s2", "s3"}, {0.5, 0.5, 0.5}};
    ValidationOptions opt;
    opt.n_val = 20;
    opt.retain.count = 50;
    opt.seed = 11;
    const auto rows = cross_validate(t, obs, opt);
    REQUIRE(rows.size() == 20);
    for (const auto& r : rows) {
        REQUIRE(r.ok);
        CHECK(r.truth.size() == 2);
        for (double q : r.quantile) {
            CHECK(q >= 0.0);
            CHECK(q <= 1.0);
        }
        CHECK(r.truth[0] == t.values(static_cast<Eigen::Index>(r.row), 0));
    }
    CHECK(cross_validate(t, obs, opt)[5].quantile == rows[5].quantile);
    const auto m = validation_matrix(rows);
    CHECK(m.rows() == 20);
    CHECK(static_cast<std::size_t>(m.cols()) == validation_header(t.param_names()).size());
    CHECK(coverage_tests(rows, t.param_names()).size() == 2);

    opt.mode = ValidationMode::retained;
    RetainOptions ro;
    ro.count = 50;
    const auto kept = retain(t, obs, ro);
    for (const auto& r : cross_validate(t, obs, opt))
        CHECK(std::find(kept.indices.begin(), kept.indices.end(), r.row) != kept.indices.end());
}

TEST_CASE("model choice validation separates the toy models") {
    const auto a = fixture::toy_table("toy-normal", 2000, 1);
    const auto b = fixture::toy_table("toy-uniform", 2000, 2);
    ModelChoiceValidationOptions opt;
    opt.n_val = 40;
    opt.count = 100;
    opt.seed = 5;
    const auto v = model_choice_validate({&a, &b}, {"mean", "var", "median", "min", "max", "range", "Q1", "Q3"}, opt);
    CHECK(v.rows.size() == 80);
    CHECK(v.confusion.counts.sum() == doctest::Approx(80));
    CHECK(v.confusion.overall > 0.9);
    for (const auto& r : v.rows) CHECK(r.probabilities[0] + r.probabilities[1] == doctest::Approx(1.0));
}
