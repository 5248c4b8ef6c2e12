#include <doctest.h>

#include <cmath>
#include <random>

#include "abctk/glm.hpp"
#include "abctk/stats.hpp"
#include "unit/fixtures.hpp"
#include "unit/oracles.hpp"

using namespace abctk;

namespace {

struct Problem {
    Eigen::MatrixXd theta, stats;
};

Problem make_problem(int n, int p, int s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    Problem out{Eigen::MatrixXd(n, p), Eigen::MatrixXd(n, s)};
    Eigen::MatrixXd b(p, s);
    for (auto& v : b.reshaped()) v = z(rng);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < p; ++j) out.theta(i, j) = u(rng);
        out.stats.row(i) = out.theta.row(i) * b;
        for (int j = 0; j < s; ++j) out.stats(i, j) += 0.3 * z(rng) + 1.0;
    }
    return out;
}

}  // namespace

TEST_CASE("GLM coefficients and residual covariance match OLS") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const int p = 1 + int(seed % 3), s = 2 + int(seed % 2);
        const auto pr = make_problem(60, p, s, seed);
        const auto fit = glm_fit(pr.theta, pr.stats);
        const auto [coef, cov] = oracle::ols(pr.theta, pr.stats);
        CHECK((fit.c - coef.row(0).transpose()).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((fit.B - coef.bottomRows(p).transpose()).cwiseAbs().maxCoeff() < 1e-8);
        const Eigen::MatrixXd ridge = 1e-8 * Eigen::MatrixXd::Identity(s, s);
        CHECK((fit.sigma - cov - ridge).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("marginal density agrees with Monte Carlo integration") {
    const auto pr = make_problem(40, 2, 3, 9);
    const auto fit = glm_fit(pr.theta, pr.stats);
    for (double w : {0.1, 0.3}) {
        const Eigen::VectorXd h = peak_widths(fit, w);
        Eigen::VectorXd s = fit.c + fit.B * Eigen::Vector2d(0.4, 0.6);
        s(0) += 0.2;
        const double got = glm_marginal_density(fit, s, w);
        const auto [mc, se] = oracle::mixture_marginal_density(fit.c, fit.B, fit.sigma, fit.theta, h, s, 1000000, 17);
        CHECK(std::abs(got - mc) < 3 * se);
        CHECK(glm_log_marginal_density(fit, s, w) == doctest::Approx(std::log(got)));
    }
}

TEST_CASE("peak widths scale with the retained range") {
    Eigen::MatrixXd theta(5, 2), stats(5, 1);
    theta << 0, 0.1, 0.5, 0.2, 1.0, 0.3, 0.2, 0.25, 0.7, 0.15;
    stats << 1, 2, 3.5, 1.2, 2.9;
    const auto h = peak_widths(glm_fit(theta, stats), 0.1);
    CHECK(h(0) == doctest::Approx(0.1));
    CHECK(h(1) == doctest::Approx(0.02));
}

TEST_CASE("posterior marginal matches direct numerical integration") {
    // One parameter: posterior(u) is proportional to sum_j N(u; theta_j, h^2) N(s; c + B u, Sigma).
    const auto pr = make_problem(30, 1, 2, 4);
    const auto fit = glm_fit(pr.theta, pr.stats);
    const double w = 0.2;
    const double h = peak_widths(fit, w)(0);
    const Eigen::VectorXd s = fit.c + fit.B * Eigen::VectorXd::Constant(1, 0.35);
    const GlmPosterior post(fit, s, w);
    const Eigen::LLT<Eigen::MatrixXd> chol(fit.sigma);
    auto unnormalized = [&](double u) {
        double prior = 0;
        for (Eigen::Index j = 0; j < fit.theta.rows(); ++j) prior += stats::normal_pdf(u, fit.theta(j, 0), h);
        const Eigen::VectorXd r = s - fit.c - fit.B.col(0) * u;
        return prior * std::exp(stats::log_mvn_density(r, chol));
    };
    const int m = 20000;
    const double lo = -1.5, hi = 2.5, du = (hi - lo) / m;
    double mass = 0;
    for (int i = 0; i <= m; ++i) mass += unnormalized(lo + i * du) * ((i == 0 || i == m) ? 0.5 : 1.0) * du;
    for (double u : {0.1, 0.3, 0.35, 0.5, 0.8}) {
        CHECK(post.marginal_unit(0, u) == doctest::Approx(unnormalized(u) / mass).epsilon(1e-6));
    }
    CHECK(post.weights().sum() == doctest::Approx(1.0));
}

TEST_CASE("marginals on the toy model are normalized and centred near the truth") {
    const auto t = fixture::toy_table("toy-normal", 2000, 3);
    RetainOptions opt;
    opt.count = 100;
    const auto r = retain(t, fixture::toy_obs(), opt);
    const auto fit = glm_fit(r);
    const GlmPosterior post(fit, r.obs, 0.1);
    const auto marginals = glm_marginals(fit, post, r, 100);
    REQUIRE(marginals.size() == 2);
    for (const auto& g : marginals) CHECK(integrate(g) == doctest::Approx(1.0).epsilon(1e-6));
    const auto mu = characterize(marginals[0]);
    CHECK(mu.mode > -0.3);
    CHECK(mu.mode < 0.5);
    const auto joint = glm_joint(fit, post, r, {0, 1}, 30);
    CHECK(joint.density.size() == 900);
    for (double v : joint.hdi) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("one-parameter GLM posterior is close to the exact Gaussian posterior") {
    const auto t = fixture::location_table(10000, -5.0, 5.0, 31);
    RetainOptions opt;
    opt.count = 10000;
    const auto kept = retain(t, ObservedStats{{"s"}, {0.5}}, opt);
    const auto fit = glm_fit(kept);
    const GlmPosterior post(fit, kept.obs, 0.01);
    const auto grid = glm_marginals(fit, post, kept, 400).front();
    // Exact posterior N(0.5, 1) truncated to [-5, 5] (the truncation is negligible).
    double tv = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid.x[i] + grid.x[i + 1]);
        const double exact = std::exp(-0.5 * (mid - 0.5) * (mid - 0.5)) / std::sqrt(2 * M_PI);
        const double approx = 0.5 * (grid.density[i] + grid.density[i + 1]);
        tv += 0.5 * std::abs(approx - exact) * (grid.x[i + 1] - grid.x[i]);
    }
    CHECK(tv < 0.02);
}
