#include "abctk/builtin_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abctk/error.hpp"
#include "abctk/stats.hpp"
#include "abctk/table_io.hpp"

namespace abctk {

const std::vector<std::string>& toy_stat_names() {
    static const std::vector<std::string> names = {"mean", "var", "median", "min", "max", "range", "Q1", "Q3"};
    return names;
}

std::vector<double> toy_stats(std::span<const double> sample) {
    if (sample.size() < 2) throw ConfigError("toy statistics need at least two values");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    const double hi = sorted.back();
    return {stats::mean(sample),
            stats::variance(sample),
            stats::quantile_sorted(sorted, 0.5),
            lo,
            hi,
            hi - lo,
            stats::quantile_sorted(sorted, 0.25),
            stats::quantile_sorted(sorted, 0.75)};
}

std::pair<double, double> uniform_bounds(double mu, double sigma2) {
    const double half = std::sqrt(3.0 * sigma2);
    return {mu - half, mu + half};
}

std::vector<double> simulate_toy_sample(ToyModel model, const ToyParams& p, Rng& rng) {
    if (!(p.sigma2 > 0.0)) throw SimulatorError("toy model needs a positive variance");
    std::vector<double> sample(p.sample_size);
    if (model == ToyModel::normal) {
        std::normal_distribution<double> dist(p.mu, std::sqrt(p.sigma2));
        for (auto& x : sample) x = dist(rng);
    } else {
        const auto [a, b] = uniform_bounds(p.mu, p.sigma2);
        for (auto& x : sample) x = a + (b - a) * uniform01(rng);
    }
    return sample;
}

std::vector<double> simulate_toy(ToyModel model, const ToyParams& params, Rng& rng) {
    return toy_stats(simulate_toy_sample(model, params, rng));
}

const std::vector<std::string>& sfs_stat_names() {
    static const std::vector<std::string> names = {"sfs1", "S", "pi", "thita", "taj_D"};
    return names;
}

SfsStats sfs_stats(const Sfs& sfs) {
    const std::size_t n = sfs.n();
    if (n < 4) throw ConfigError("SFS statistics need a sample size of at least 4");
    for (double c : sfs.counts) {
        if (c < 0.0) throw ConfigError("SFS counts must be non-negative");
    }
    const double nd = static_cast<double>(n);
    double sum = 0.0, a1 = 0.0, a2 = 0.0;
    SfsStats out;
    for (std::size_t i = 1; i < n; ++i) {
        const double id = static_cast<double>(i);
        sum += id * (nd - id) * sfs.counts[i];
        out.S += sfs.counts[i];
        a1 += 1.0 / id;
        a2 += 1.0 / (id * id);
    }
    out.sfs1 = sfs.counts[1];
    out.theta_w = out.S / a1;
    out.pi = 2.0 * sum / (nd * (nd - 1.0));
    const double b1 = (nd + 1.0) / (3.0 * (nd - 1.0));
    const double b2 = 2.0 * (nd * nd + nd + 3.0) / (9.0 * nd * (nd - 1.0));
    const double c1 = b1 - 1.0 / a1;
    const double c2 = b2 - (nd + 2.0) / (a1 * nd) + a2 / (a1 * a1);
    const double e1 = c1 / a1;
    const double e2 = c2 / (a1 * a1 + a2);
    if (out.S > 1.0) out.tajima_d = (out.pi - out.S / a1) / std::sqrt(e1 * out.S + e2 * out.S * (out.S - 1.0));
    return out;
}

double tau_to_generations(double tau, double n_cur) { return tau * 2.0 * n_cur; }

Sfs simulate_sfs(const GrowthModel& m, Rng& rng) {
    const std::size_t n = m.sample_size;
    if (n < 2) throw SimulatorError("coalescent needs at least two sampled genes");
    if (!(m.n_cur > 0.0) || !(m.omega > 0.0)) throw SimulatorError("population sizes must be positive");
    Sfs sfs;
    sfs.counts.assign(n + 1, 0.0);
    std::exponential_distribution<double> unit_exp(1.0);
    std::vector<double> branch(n, 0.0);  // total branch length subtending i descendants
    std::vector<std::size_t> lineages;
    for (std::size_t locus = 0; locus < m.loci; ++locus) {
        std::fill(branch.begin(), branch.end(), 0.0);
        lineages.assign(n, 1);  // descendant count of each active lineage
        double t = 0.0;
        while (lineages.size() > 1) {
            const double k = static_cast<double>(lineages.size());
            const double pairs = k * (k - 1.0) / 2.0;
            const double size = t < m.t1 ? m.n_cur : m.n_cur * m.omega;
            const double wait = unit_exp(rng) * size / pairs;
            if (t < m.t1 && t + wait > m.t1) {
                // No coalescence before the size change; restart there (memoryless).
                for (auto d : lineages) branch[d] += m.t1 - t;
                t = m.t1;
                continue;
            }
            for (auto d : lineages) branch[d] += wait;
            t += wait;
            std::uniform_int_distribution<std::size_t> pick(0, lineages.size() - 1);
            const std::size_t a = pick(rng);
            std::size_t b = pick(rng);
            while (b == a) b = pick(rng);
            lineages[a] += lineages[b];
            lineages.erase(lineages.begin() + static_cast<std::ptrdiff_t>(b));
        }
        double polymorphic = 0.0;
        for (std::size_t d = 1; d < n; ++d) {
            std::poisson_distribution<long> mutations(branch[d] * m.mutation_rate * static_cast<double>(m.sites_per_locus));
            const double hits = static_cast<double>(mutations(rng));
            sfs.counts[d] += hits;
            polymorphic += hits;
        }
        sfs.counts[0] += std::max(0.0, static_cast<double>(m.sites_per_locus) - polymorphic);
    }
    return sfs;
}

Sfs parse_daf(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(in, line)) throw IoError(source + ": expected at least three lines");
    }
    auto fields = split_fields(line);
    if (!fields.empty() && !parse_double(fields.front())) fields.erase(fields.begin());
    Sfs sfs;
    for (const auto& f : fields) {
        const auto v = parse_double(f);
        if (!v || !std::isfinite(*v)) throw IoError(source + ": '" + f + "' is not a count");
        sfs.counts.push_back(*v);
    }
    if (sfs.counts.size() < 5) throw IoError(source + ": frequency spectrum has too few classes");
    return sfs;
}

}  // namespace abctk
