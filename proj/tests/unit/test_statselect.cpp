#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "abctk/error.hpp"
#include "abctk/statselect.hpp"
#include "abctk/stats.hpp"
#include "unit/fixtures.hpp"
#include "unit/oracles.hpp"

using namespace abctk;

TEST_CASE("boosting appends pairwise products") {
    CHECK(boosted_names({"a", "b"}) == std::vector<std::string>{"a", "b", "a_X_a", "a_X_b", "b_X_b"});
    const auto o = boost(ObservedStats{{"a", "b"}, {2, 3}});
    CHECK(o.values == std::vector<double>{2, 3, 4, 6, 9});
    const auto t = boost(fixture::linear_table(5, 1, 2, 0.1, 1));
    REQUIRE(t.cols() == 6);
    CHECK(t.column_names[4] == "s1_X_s2");
    CHECK(t.values(3, 4) == doctest::Approx(t.values(3, 1) * t.values(3, 2)));
    CHECK(t.param_names() == std::vector<std::string>{"p1"});
}

TEST_CASE("Box-Cox normalization by hand") {
    BoxCoxSpec s{10, 0, 0.5, 2.0, 0.1, 0.5};
    // x' = 1.5; bc = (sqrt(1.5) - 1) / (0.5 * 2^-0.5)
    const double bc = (std::sqrt(1.5) - 1) / (0.5 * std::pow(2.0, -0.5));
    CHECK(s.box_cox(5) == doctest::Approx(bc));
    CHECK(s.standardize(5, true) == doctest::Approx((bc - 0.1) / 0.5));
    CHECK(s.standardize(5, false) == doctest::Approx((5 - 0.1) / 0.5));
    s.lambda = 0;
    CHECK(s.box_cox(5) == doctest::Approx(2 * std::log(1.5)));
    CHECK(std::isnan(s.box_cox(-20)));
}

TEST_CASE("fitted Box-Cox specs standardize their input") {
    std::mt19937_64 rng(2);
    std::lognormal_distribution<double> ln(0, 1);
    Eigen::VectorXd x(2000);
    for (auto& v : x) v = ln(rng);
    const auto spec = fit_box_cox(x);
    CHECK(spec.lambda >= -2);
    CHECK(spec.lambda <= 2);
    CHECK(spec.lambda < 0.5);
    std::vector<double> z;
    for (double v : x) z.push_back(spec.standardize(v, true));
    CHECK(stats::mean(z) == doctest::Approx(0).scale(1).epsilon(1e-9));
    CHECK(stats::sd(z) == doctest::Approx(1).epsilon(1e-9));
}

TEST_CASE("the population-growth linear-combination file parses") {
    const auto def = read_linear_comb(ABCTK_TEST_DATA "/PLSdef_popgen.txt");
    CHECK(def.names.size() == 20);
    CHECK(def.names[5] == "sfs1_X_sfs1");
    CHECK(def.components() == 4);
    CHECK(def.box_cox[0].max == 1140);
    CHECK(def.box_cox[0].lambda == doctest::Approx(-17.58));
    CHECK(def.box_cox[0].sd == doctest::Approx(0.07));
    CHECK(def.loadings(0, 0) == doctest::Approx(0.22));
    CHECK(boosted_names({"sfs1", "S", "pi", "thita", "taj_D"}) == def.names);
}

TEST_CASE("malformed linear-combination files") {
    std::istringstream ragged("a 1 0 1 1 0 1 0.5\nb 1 0 1 1 0 1 0.5 0.2\n");
    CHECK_THROWS_AS(parse_linear_comb(ragged, "mem"), ConfigError);
    std::istringstream short_row("a 1 0 1 1 0\n");
    CHECK_THROWS(parse_linear_comb(short_row, "mem"));
}

TEST_CASE("linear-combination files round-trip") {
    LinearCombDef def;
    def.names = {"x", "y"};
    def.box_cox = {BoxCoxSpec{5, 1, 0.3, 2, 0.1, 1.2}, BoxCoxSpec{9, -1, -0.7, 1.5, -0.2, 0.8}};
    def.loadings.resize(2, 2);
    def.loadings << 0.6, -0.8, 0.8, 0.6;
    std::stringstream io;
    write_linear_comb(io, def);
    const auto back = parse_linear_comb(io, "mem");
    CHECK(back.names == def.names);
    CHECK(back.box_cox[1].lambda == doctest::Approx(-0.7));
    CHECK((back.loadings - def.loadings).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("transform golden values") {
    LinearCombDef def;
    def.names = {"s1", "s2"};
    def.box_cox = {BoxCoxSpec{4, 0, 1.0, 1.0, 0.5, 2.0}, BoxCoxSpec{2, 0, 0.0, 1.0, 0.0, 1.0}};
    def.loadings.resize(2, 2);
    def.loadings << 1, 0.5, 2, -1;
    const ObservedStats obs{{"other", "s2", "s1"}, {7, 1, 2}};
    // s1: x' = 1.5, bc = 0.5, z = 0;  s2: x' = 1.5, bc = log 1.5
    const double z1 = 0.0, z2 = std::log(1.5);
    const auto out = transform(obs, def, 2, true);
    CHECK(out.names == std::vector<std::string>{"other", "LinearCombination_1", "LinearCombination_2"});
    CHECK(out.values[0] == 7);
    CHECK(out.values[1] == doctest::Approx(z1 * 1 + z2 * 2));
    CHECK(out.values[2] == doctest::Approx(z1 * 0.5 - z2));
    const auto raw = transform(obs, def, 1, false);
    CHECK(raw.values[1] == doctest::Approx((2 - 0.5) / 2.0 + 1.0 * 2));
    CHECK_THROWS_AS(transform(ObservedStats{{"s1"}, {1}}, def, 1, true), ConfigError);
}

TEST_CASE("NIPALS scores match the SVD formulation up to sign") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(50, 8), y(50, 3);
    for (auto& v : x.reshaped()) v = z(rng);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 3; ++j) y(i, j) = x(i, j) + 0.5 * x(i, j + 3) + 0.3 * z(rng);
    x = x.rowwise() - x.colwise().mean();
    y = y.rowwise() - y.colwise().mean();
    const auto m = nipals_pls(x, y, 4);
    const auto t = oracle::pls_scores(x, y, 4);
    for (int a = 0; a < 4; ++a) {
        const double same = (m.scores.col(a) - t.col(a)).cwiseAbs().maxCoeff();
        const double flipped = (m.scores.col(a) + t.col(a)).cwiseAbs().maxCoeff();
        CHECK(std::min(same, flipped) < 1e-6);
    }
    // Scores are mutually orthogonal.
    const Eigen::MatrixXd g = m.scores.transpose() * m.scores;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < a; ++b) CHECK(std::abs(g(a, b)) < 1e-8 * g(a, a));
}

TEST_CASE("component recommendation") {
    Eigen::MatrixXd r(4, 2);
    r << 10, 3, 5, 2.01, 4.99, 2.0, 4.98, 2.0;
    CHECK(recommend_components(r) == 2);
    r(1, 1) = 2.5;
    CHECK(recommend_components(r) == 3);
}

TEST_CASE("PLS on a linear problem predicts well with few components") {
    const auto t = fixture::linear_table(400, 2, 6, 0.05, 12);
    PlsOptions opt;
    opt.max_components = 5;
    opt.folds = 5;
    opt.box_cox = false;
    opt.seed = 3;
    const auto res = fit_pls(t, opt);
    CHECK(res.rmsep.rows() == 5);
    CHECK(res.recommended <= 3);
    CHECK(res.rmsep(res.rmsep.rows() - 1, 0) < 0.1);
    CHECK(res.def.names.size() == 6);
}
