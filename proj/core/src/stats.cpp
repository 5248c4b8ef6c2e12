#include "abctk/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace abctk::stats {

double mean(std::span<const double> x) {
    if (x.empty()) return 0.0;
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) return 0.0;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

double sd(std::span<const double> x) { return std::sqrt(variance(x)); }

double quantile_sorted(std::span<const double> sorted, double p) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

Eigen::MatrixXd correlation_matrix(const Eigen::MatrixXd& data) {
    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered;
    const Eigen::VectorXd s = cov.diagonal().cwiseSqrt();
    for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        for (Eigen::Index j = 0; j < cov.cols(); ++j) {
            const double denom = s(i) * s(j);
            cov(i, j) = denom > 0.0 ? cov(i, j) / denom : 0.0;
        }
    }
    return cov;
}

KsResult ks_uniform(std::span<const double> x) {
    return ks_test(std::vector<double>(x.begin(), x.end()),
                   [](double v) { return std::clamp(v, 0.0, 1.0); });
}

double ks_p_value(double d, std::size_t n) {
    if (n == 0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    if (lambda < 1e-3) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_cdf(double x, double mean, double sd) {
    return boost::math::cdf(boost::math::normal_distribution<double>(mean, sd), x);
}

double normal_quantile(double p, double mean, double sd) {
    return boost::math::quantile(boost::math::normal_distribution<double>(mean, sd), p);
}

double log_mvn_density(const Eigen::VectorXd& residual, const Eigen::LLT<Eigen::MatrixXd>& chol) {
    const Eigen::VectorXd z = chol.matrixL().solve(residual);
    const auto& l = chol.matrixLLT();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    const double k = static_cast<double>(residual.size());
    return -0.5 * (z.squaredNorm() + log_det + k * std::log(2.0 * std::numbers::pi));
}

double log_sum_exp(const Eigen::VectorXd& v) {
    if (v.size() == 0) return -std::numeric_limits<double>::infinity();
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace abctk::stats
