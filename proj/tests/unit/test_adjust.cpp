#include <doctest.h>

#include <random>

#include "abctk/adjust.hpp"
#include "abctk/error.hpp"
#include "unit/fixtures.hpp"
#include "unit/oracles.hpp"

using namespace abctk;

TEST_CASE("weighted regression matches the normal-equation oracle") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.1, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 40 + rep, p = 1 + rep % 4, q = 1 + rep % 3;
        Eigen::MatrixXd x(n, p), y(n, q);
        Eigen::VectorXd w(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < p; ++j) x(i, j) = z(rng);
            for (int j = 0; j < q; ++j) y(i, j) = z(rng) + x.row(i).sum() * (j + 1);
            w(i) = u(rng);
        }
        const auto got = weighted_regression(x, y, w);
        const auto want = oracle::wls(x, y, w);
        REQUIRE(got.rows() == want.rows());
        CHECK((got - want).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("collinear designs need the ridge variant") {
    Eigen::MatrixXd x(10, 2);
    Eigen::MatrixXd y(10, 1);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i;
        x(i, 1) = 2 * i;
        y(i, 0) = i + 1;
    }
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(10);
    CHECK_THROWS_AS(weighted_regression(x, y, w), CollinearityError);
    const auto b = weighted_regression(x, y, w, 1e-4);
    CHECK(b(0, 0) + 9 * (b(1, 0) + 2 * b(2, 0)) == doctest::Approx(10).epsilon(1e-3));
}

TEST_CASE("Epanechnikov weights") {
    const auto w = epanechnikov_weights({0.0, 1.0, 2.0}, 2.0);
    // raw 1, 0.75, 0
    CHECK(w(0) == doctest::Approx(1 / 1.75));
    CHECK(w(1) == doctest::Approx(0.75 / 1.75));
    CHECK(w(2) == doctest::Approx(0.0));
    const auto flat = epanechnikov_weights({0.0, 0.0}, 0.0);
    CHECK(flat(0) == doctest::Approx(0.5));
}

TEST_CASE("an exact linear relation adjusts every sample onto the truth") {
    auto t = fixture::linear_table(500, 1, 1, 0.0, 31);
    // s1 = c + b p1 exactly; invert it at the observation.
    const double c0 = t.values(0, 1), c1 = t.values(1, 1);
    const double b = (c1 - c0) / (t.values(1, 0) - t.values(0, 0));
    const double a = c0 - b * t.values(0, 0);
    const double truth = 0.2;
    RetainOptions opt;
    opt.count = 50;
    const auto r = retain(t, ObservedStats{{"s1"}, {a + b * truth}}, opt);
    const auto adj = loclinear_adjust(r);
    CHECK(adj.weights.sum() == doctest::Approx(1.0));
    for (Eigen::Index i = 0; i < adj.adjusted.rows(); ++i) CHECK(adj.adjusted(i, 0) == doctest::Approx(truth).epsilon(1e-8));
    const auto ridge = ridge_adjust(r);
    CHECK(ridge.adjusted(0, 0) == doctest::Approx(truth).epsilon(1e-3));
}

TEST_CASE("weighted KDE integrates to one") {
    Eigen::VectorXd v(4), w(4);
    v << 0.1, 0.2, 0.3, 0.9;
    w << 0.25, 0.25, 0.25, 0.25;
    const auto g = weighted_kde(v, w, -1, 2, 1024);
    CHECK(integrate(g) == doctest::Approx(1.0).epsilon(1e-3));
}
