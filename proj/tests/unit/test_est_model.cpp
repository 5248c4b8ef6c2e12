#include <doctest.h>

#include <cmath>
#include <string>

#include "abctk/error.hpp"
#include "abctk/est_model.hpp"
#include "abctk/expression.hpp"

using namespace abctk;

namespace {

Bindings bind(std::initializer_list<std::pair<const char*, double>> values) {
    std::vector<std::pair<std::string, double>> v(values.begin(), values.end());
    return [v](std::string_view name) -> std::optional<double> {
        for (const auto& [k, x] : v)
            if (k == name) return x;
        return std::nullopt;
    };
}

}  // namespace

TEST_CASE("expressions: precedence and functions") {
    const auto eval = [](const char* text) { return Expression::parse(text).evaluate(bind({{"a", 2}, {"b", 3}})); };
    CHECK(eval("1 + 2 * 3") == doctest::Approx(7));
    CHECK(eval("(1 + 2) * 3") == doctest::Approx(9));
    CHECK(eval("2 ^ 3 ^ 2") == doctest::Approx(512));
    CHECK(eval("-2 ^ 2") == doctest::Approx(-4));
    CHECK(eval("a * b - a / b") == doctest::Approx(6 - 2.0 / 3));
    CHECK(eval("pow10(a)") == doctest::Approx(100));
    CHECK(eval("min(a, b) + max(a, b)") == doctest::Approx(5));
    CHECK(eval("pow(b, 2) + sqrt(abs(-16)) + log10(1000)") == doctest::Approx(16));
    CHECK(eval("exp(log(a))") == doctest::Approx(2));
    CHECK(Expression::parse("x * (y + 1) - x").identifiers() == std::vector<std::string>{"x", "y"});
}

TEST_CASE("expressions: parse and evaluation errors") {
    CHECK_THROWS_AS(Expression::parse("1 +"), ParseError);
    CHECK_THROWS_AS(Expression::parse("(a"), ParseError);
    CHECK_THROWS_AS(Expression::parse("foo(1)"), ParseError);
    CHECK_THROWS_AS(Expression::parse("a / 0").evaluate(bind({{"a", 1}})), EvalError);
    CHECK_THROWS_AS(Expression::parse("log(a)").evaluate(bind({{"a", -1}})), EvalError);
    CHECK_THROWS_AS(Expression::parse("zz").evaluate(bind({})), EvalError);
}

TEST_CASE("the population-growth est file parses") {
    const auto m = read_est(ABCTK_TEST_DATA "/popgen.est");
    REQUIRE(m.priors.size() == 4);
    CHECK(m.priors[0].name == "LOG10_N_CUR");
    CHECK(m.priors[1].min == -3);
    CHECK(m.priors[3].is_fixed());
    CHECK(m.priors[3].value == doctest::Approx(2.5e-8));
    CHECK_FALSE(m.priors[3].output);
    REQUIRE(m.complex.size() == 3);
    CHECK(m.complex[0].integer);
    CHECK_FALSE(m.complex[2].integer);
    CHECK(m.names().size() == 7);
}

TEST_CASE("complex parameters follow their definitions with integer truncation") {
    PriorSampler sampler(read_est(ABCTK_TEST_DATA "/popgen.est"));
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto d = sampler.sample(rng);
        const double ncur = *d.value("N_CUR");
        CHECK(ncur == std::trunc(std::pow(10.0, *d.value("LOG10_N_CUR"))));
        CHECK(*d.value("T1") == std::trunc(*d.value("TAU") * 2 * ncur));
        CHECK(*d.value("OMEGA") == doctest::Approx(std::pow(10.0, *d.value("LOG10_OMEGA"))));
        CHECK(*d.value("TAU") >= 0.0);
        CHECK(*d.value("TAU") <= 1.0);
    }
    CHECK(sampler.sample(rng).output_names() == std::vector<std::string>{"LOG10_N_CUR", "LOG10_OMEGA", "TAU"});
}

TEST_CASE("rules are enforced on every draw") {
    const auto m = parse_est(
        "[PARAMETERS]\n0 A unif 0 1 output\n0 B unif 0 1 output\n1 K unif 1 10 output\n"
        "[RULES]\nA < B\nK > 3\n");
    REQUIRE(m.rules.size() == 2);
    PriorSampler sampler(m);
    Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const auto d = sampler.sample(rng);
        CHECK(*d.value("A") < *d.value("B"));
        CHECK(*d.value("K") > 3);
        CHECK(*d.value("K") == std::trunc(*d.value("K")));
    }
}

TEST_CASE("prior kinds draw inside their support") {
    PriorSampler sampler(parse_est(
        "[PARAMETERS]\n0 L logunif 1 1000 output\n0 N norm -5 5 0 2 output\n0 U unif -1 1 output\n"));
    Rng rng(2);
    double log_mean = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto d = sampler.sample(rng);
        CHECK(*d.value("L") >= 1);
        CHECK(*d.value("L") <= 1000);
        CHECK(std::abs(*d.value("N")) <= 5);
        log_mean += std::log10(*d.value("L")) / n;
    }
    CHECK(log_mean == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("unsatisfiable rules are rejected up front") {
    CHECK_THROWS_AS(PriorSampler(parse_est("[PARAMETERS]\n0 A unif 0 1 output\n[RULES]\nA > 2\n")), ConfigError);
}

TEST_CASE("est errors carry line numbers") {
    const auto message = [](const char* text) {
        try {
            parse_est(text);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("[PARAMETERS]\n0 A unif 0 1 output\n0 B gamma 1 2 output\n").find("line 3") != std::string::npos);
    CHECK(message("[PARAMETERS]\n0 A unif 1 0 output\n").find("line 2") != std::string::npos);
    CHECK(message("[PARAMETERS]\n0 A unif 0 1 output\n[COMPLEX PARAMETERS]\n0 C = A * Z output\n")
              .find("line 4") != std::string::npos);
    CHECK(message("[PARAMETERS]\n0 A unif 0 1 output\n0 A unif 0 1 output\n").find("line 3") != std::string::npos);
    CHECK_FALSE(message("[PARAMETERS]\n0 A unif 0 1 output\n[RULES]\nA < Q\n").empty());
}

TEST_CASE("prior densities") {
    const auto m = parse_est("[PARAMETERS]\n0 A unif 0 2 output\n0 B logunif 1 100 output\n");
    CHECK(m.priors[0].density(1.0) == doctest::Approx(0.5));
    CHECK(m.priors[0].density(3.0) == 0.0);
    CHECK(m.priors[1].density(10.0) == doctest::Approx(1.0 / (10.0 * std::log(100.0))));
}
