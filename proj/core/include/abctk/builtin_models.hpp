#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "abctk/random.hpp"

namespace abctk {

/// mean, var, median, min, max, range, Q1, Q3
const std::vector<std::string>& toy_stat_names();

/// The eight toy statistics of a sample (variance with n - 1, type-7 quartiles).
std::vector<double> toy_stats(std::span<const double> sample);

enum class ToyModel { normal, uniform };

struct ToyParams {
    double mu = 0.0;
    double sigma2 = 1.0;
    std::size_t sample_size = 100;
};

/// Bounds (a, b) of the uniform distribution with mean mu and variance sigma2.
std::pair<double, double> uniform_bounds(double mu, double sigma2);

std::vector<double> simulate_toy_sample(ToyModel model, const ToyParams& params, Rng& rng);
std::vector<double> simulate_toy(ToyModel model, const ToyParams& params, Rng& rng);

/// Site frequency spectrum: counts[i] sites with i derived alleles, i = 0..n.
struct Sfs {
    std::vector<double> counts;
    std::size_t n() const { return counts.empty() ? 0 : counts.size() - 1; }
};

struct SfsStats {
    double sfs1 = 0.0;
    double S = 0.0;
    double pi = 0.0;
    double theta_w = 0.0;
    double tajima_d = 0.0;

    std::vector<double> values() const { return {sfs1, S, pi, theta_w, tajima_d}; }
};

/// sfs1 S pi thita taj_D
const std::vector<std::string>& sfs_stat_names();

/// Singletons, segregating sites, pi, Watterson's theta and Tajima's D (0 when S <= 1).
SfsStats sfs_stats(const Sfs& sfs);

double tau_to_generations(double tau, double n_cur);

/// Piecewise-constant population history for the coalescent: size `n_cur` (in genes) up
/// to `t1` generations back, `omega * n_cur` before.
struct GrowthModel {
    double n_cur = 1e4;
    double t1 = 0.0;
    double omega = 1.0;
    double mutation_rate = 2.5e-8;
    std::size_t sample_size = 24;
    std::size_t loci = 10;
    std::size_t sites_per_locus = 1000;
};

/// Unfolded SFS of independent non-recombining loci under the Kingman coalescent with
/// infinite-sites mutations.
Sfs simulate_sfs(const GrowthModel& model, Rng& rng);

/// Parses the third line of a derived-allele-frequency file (an optional leading label
/// is skipped). The sample size is the number of classes minus one.
Sfs parse_daf(const std::string& text, const std::string& source);

}  // namespace abctk
