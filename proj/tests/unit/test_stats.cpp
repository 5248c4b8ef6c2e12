#include <doctest.h>

#include <random>
#include <vector>

#include "abctk/random.hpp"
#include "abctk/stats.hpp"
#include "unit/oracles.hpp"

using namespace abctk;

TEST_CASE("mean, variance and type-7 quantiles of 1..5") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    CHECK(stats::mean(x) == doctest::Approx(3.0));
    CHECK(stats::variance(x) == doctest::Approx(2.5));
    CHECK(stats::quantile_sorted(x, 0.25) == doctest::Approx(2.0));
    CHECK(stats::quantile_sorted(x, 0.75) == doctest::Approx(4.0));
    CHECK(stats::quantile_sorted(x, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("type-7 quantile agrees with the interpolation oracle") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> x(3 + rep * 7);
        for (auto& v : x) v = z(rng);
        auto sorted = x;
        std::sort(sorted.begin(), sorted.end());
        for (double p : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
            CHECK(stats::quantile_sorted(sorted, p) == doctest::Approx(oracle::quantile7(x, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("Kolmogorov tail probabilities") {
    // Asymptotic limit: large n makes the small-sample correction vanish.
    const std::size_t n = 100000000;
    const double sn = std::sqrt(static_cast<double>(n));
    CHECK(stats::ks_p_value(1.0 / sn, n) == doctest::Approx(0.26999967).epsilon(1e-4));
    CHECK(stats::ks_p_value(1.36 / sn, n) == doctest::Approx(0.04947).epsilon(1e-3));
    CHECK(stats::ks_p_value(0.0, 10) == 1.0);
}

TEST_CASE("KS uniformity accepts uniform draws and rejects skewed ones") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u;
    std::vector<double> good(2000), bad(2000);
    for (auto& v : good) v = u(rng);
    for (auto& v : bad) v = u(rng) * u(rng);
    CHECK(stats::ks_uniform(good).p_value > 0.01);
    CHECK(stats::ks_uniform(bad).p_value < 1e-10);
}

TEST_CASE("KS statistic of a known sample") {
    const std::vector<double> x{0.1, 0.4, 0.7};
    // D = max(i/n - x_i, x_i - (i-1)/n) = max(0.1, 0.2667, 0.0667, 0.0667, 0.3, 0.0333)
    CHECK(stats::ks_uniform(x).statistic == doctest::Approx(0.3));
}

TEST_CASE("normal distribution helpers") {
    CHECK(stats::normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(stats::normal_pdf(0.0) == doctest::Approx(0.3989422804014327));
}

TEST_CASE("correlation matrix and log-sum-exp") {
    Eigen::MatrixXd d(4, 2);
    d << 1, 2, 2, 4, 3, 6, 4, 8.5;
    const auto r = stats::correlation_matrix(d);
    CHECK(r(0, 0) == doctest::Approx(1.0));
    CHECK(r(0, 1) > 0.99);
    Eigen::VectorXd v(3);
    v << 1000, 1000, 1000;
    CHECK(stats::log_sum_exp(v) == doctest::Approx(1000 + std::log(3.0)));
}

TEST_CASE("streams are reproducible and distinct") {
    auto a = make_stream(42, 0), b = make_stream(42, 0), c = make_stream(42, 1);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
}
