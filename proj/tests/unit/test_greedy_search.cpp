#include <doctest.h>

#include <random>

#include "abctk/error.hpp"
#include "abctk/greedy_search.hpp"
#include "abctk/log.hpp"

using namespace abctk;

namespace {

// One parameter; statistic "signal" is shifted by `offset`, the others are pure noise.
SimulationTable model(double offset, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    SimulationTable t;
    t.column_names = {"theta", "noise1", "signal", "noise2", "signal_copy"};
    t.param_columns = {0};
    t.values.resize(400, 5);
    for (Eigen::Index r = 0; r < 400; ++r) {
        const double theta = z(rng);
        t.values(r, 0) = theta;
        t.values(r, 1) = z(rng);
        t.values(r, 2) = offset + theta * 0.2 + 0.3 * z(rng);
        t.values(r, 3) = z(rng);
        t.values(r, 4) = t.values(r, 2) + 1e-3 * z(rng);
    }
    return t;
}

struct QuietLog {
    log::Sink previous = log::set_sink({});
    ~QuietLog() { log::set_sink(previous); }
};

}  // namespace

TEST_CASE("greedy search finds the informative statistic") {
    QuietLog quiet;
    const auto a = model(0.0, 1), b = model(4.0, 2);
    GreedyOptions opt;
    opt.validation.n_val = 25;
    opt.validation.count = 50;
    opt.validation.seed = 4;
    opt.max_cor = 0.9;
    const auto res = greedy_search({&a, &b}, {"noise1", "signal", "noise2", "signal_copy"}, opt);
    REQUIRE_FALSE(res.empty());
    const auto& best = res.front();
    CHECK(best.power > 0.95);
    CHECK(best.stats.size() == 1);
    for (std::size_t i = 1; i < res.size(); ++i) CHECK(res[i - 1].power >= res[i].power);
    for (const auto& r : res) {
        CHECK(r.max_pairwise_cor <= 0.9);
        if (r.stats == std::vector<std::string>{"noise1"}) CHECK(r.power < 0.8);
    }
}

TEST_CASE("greedy search needs two models and candidates") {
    const auto a = model(0.0, 1);
    GreedyOptions opt;
    CHECK_THROWS_AS(greedy_search({&a}, {"signal"}, opt), ConfigError);
    CHECK_THROWS_AS(greedy_search({&a, &a}, {}, opt), ConfigError);
    CHECK_THROWS_AS(greedy_search({&a, &a}, {"missing"}, opt), ConfigError);
}
