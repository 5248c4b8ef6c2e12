#include <benchmark/benchmark.h>

#include <random>

#include "abctk/builtin_models.hpp"
#include "abctk/glm.hpp"
#include "abctk/random.hpp"
#include "abctk/rejection.hpp"
#include "abctk/statselect.hpp"

using namespace abctk;

namespace {

SimulationTable random_table(Eigen::Index rows, Eigen::Index params, Eigen::Index stats) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> z;
    SimulationTable t;
    for (Eigen::Index p = 0; p < params; ++p) {
        t.column_names.push_back("p" + std::to_string(p + 1));
        t.param_columns.push_back(static_cast<std::size_t>(p));
    }
    for (Eigen::Index s = 0; s < stats; ++s) t.column_names.push_back("s" + std::to_string(s + 1));
    t.values.resize(rows, params + stats);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < t.values.cols(); ++c) t.values(r, c) = z(rng);
    for (Eigen::Index s = 0; s < stats; ++s) t.values.col(params + s) += t.values.col(s % params);
    return t;
}

ObservedStats zero_obs(const SimulationTable& t, Eigen::Index params) {
    ObservedStats o;
    for (std::size_t c = static_cast<std::size_t>(params); c < t.column_names.size(); ++c) {
        o.names.push_back(t.column_names[c]);
        o.values.push_back(0.0);
    }
    return o;
}

void BM_Retain(benchmark::State& state) {
    const auto t = random_table(state.range(0), 3, 10);
    const auto obs = zero_obs(t, 3);
    RetainOptions opt;
    opt.count = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(retain(t, obs, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Retain)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_GlmPosteriorMarginals(benchmark::State& state) {
    const auto t = random_table(20000, 3, 10);
    RetainOptions opt;
    opt.count = static_cast<std::size_t>(state.range(0));
    const auto kept = retain(t, zero_obs(t, 3), opt);
    for (auto _ : state) {
        const auto fit = glm_fit(kept);
        const GlmPosterior post(fit, kept.obs, 0.1);
        benchmark::DoNotOptimize(glm_marginals(fit, post, kept, 100));
    }
}
BENCHMARK(BM_GlmPosteriorMarginals)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Nipals(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Eigen::MatrixXd x(state.range(0), 20), y(state.range(0), 3);
    for (auto& v : x.reshaped()) v = z(rng);
    for (auto& v : y.reshaped()) v = z(rng);
    y += x.leftCols(3);
    for (auto _ : state) benchmark::DoNotOptimize(nipals_pls(x, y, 8));
}
BENCHMARK(BM_Nipals)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_ToySimulation(benchmark::State& state) {
    Rng rng = make_stream(1, 0);
    const ToyParams p{0.0, 1.0, static_cast<std::size_t>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(simulate_toy(ToyModel::normal, p, rng));
}
BENCHMARK(BM_ToySimulation)->Arg(100);

void BM_CoalescentSfs(benchmark::State& state) {
    Rng rng = make_stream(1, 1);
    GrowthModel m;
    m.loci = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_sfs(m, rng));
}
BENCHMARK(BM_CoalescentSfs)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
