#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace abctk::stats {

double mean(std::span<const double> x);

/// Unbiased sample variance (n - 1 denominator). Zero for fewer than two values.
double variance(std::span<const double> x);

double sd(std::span<const double> x);

/// Quantile with linear interpolation between order statistics (Hyndman & Fan type 7).
/// `sorted` must be sorted ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double p);

double pearson(std::span<const double> x, std::span<const double> y);

/// Column-wise Pearson correlation matrix of `data` (rows = observations).
Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of `x` against U(0, 1).
KsResult ks_uniform(std::span<const double> x);

/// One-sample KS test against an arbitrary continuous CDF.
template <typename Cdf>
KsResult ks_test(std::vector<double> x, Cdf&& cdf);

/// Asymptotic Kolmogorov survival function with the Stephens correction for sample size n.
double ks_p_value(double d, std::size_t n);

double normal_pdf(double x, double mean = 0.0, double sd = 1.0);
double normal_cdf(double x, double mean = 0.0, double sd = 1.0);
double normal_quantile(double p, double mean = 0.0, double sd = 1.0);

/// log of a multivariate normal density, given the Cholesky factor of the covariance.
double log_mvn_density(const Eigen::VectorXd& residual, const Eigen::LLT<Eigen::MatrixXd>& chol);

/// log(sum(exp(v))) without overflow.
double log_sum_exp(const Eigen::VectorXd& v);

}  // namespace abctk::stats

#include <algorithm>
#include <cmath>

namespace abctk::stats {

template <typename Cdf>
KsResult ks_test(std::vector<double> x, Cdf&& cdf) {
    KsResult out;
    if (x.empty()) return out;
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    out.statistic = d;
    out.p_value = ks_p_value(d, x.size());
    return out;
}

}  // namespace abctk::stats
