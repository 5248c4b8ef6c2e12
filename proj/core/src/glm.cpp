#include "abctk/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abctk/error.hpp"
#include "abctk/stats.hpp"

namespace abctk {

namespace {

constexpr double kSigmaFloor = 1e-8;
constexpr double kLog2Pi = 1.8378770664093454836;

}  // namespace

GlmFit glm_fit(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& stats) {
    const Eigen::Index n = theta.rows();
    const Eigen::Index p = theta.cols();
    const Eigen::Index s = stats.cols();
    if (n <= p + 1) {
        throw NumericalError("GLM needs more retained simulations (" + std::to_string(n) + ") than parameters + 1");
    }
    Eigen::MatrixXd X(n, p + 1);
    X.col(0).setOnes();
    X.rightCols(p) = theta;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < p + 1) {
        throw NumericalError("GLM parameter design is rank deficient; a retained parameter does not vary");
    }
    const Eigen::MatrixXd coef = qr.solve(stats);  // (p+1) x s
    const Eigen::MatrixXd resid = stats - X * coef;
    GlmFit fit;
    fit.c = coef.row(0).transpose();
    fit.B = coef.bottomRows(p).transpose();
    fit.sigma = resid.transpose() * resid / static_cast<double>(n - p - 1);
    fit.sigma += kSigmaFloor * Eigen::MatrixXd::Identity(s, s);
    fit.theta = theta;
    fit.scaling.lower = Eigen::VectorXd::Zero(p);
    fit.scaling.upper = Eigen::VectorXd::Ones(p);
    return fit;
}

GlmFit glm_fit(const RetainedSet& retained) {
    ParamScaling scaling{retained.param_lower, retained.param_upper};
    Eigen::MatrixXd unit(retained.params.rows(), retained.params.cols());
    for (Eigen::Index j = 0; j < unit.cols(); ++j) {
        if (!(scaling.width(j) > 0.0)) {
            throw NumericalError("parameter '" + retained.param_names[static_cast<std::size_t>(j)] +
                                 "' is constant across the simulations");
        }
        for (Eigen::Index i = 0; i < unit.rows(); ++i) unit(i, j) = scaling.to_unit(j, retained.params(i, j));
    }
    GlmFit fit = glm_fit(unit, retained.stats);
    fit.scaling = scaling;
    return fit;
}

Eigen::VectorXd peak_widths(const GlmFit& fit, double dirac_peak_width) {
    Eigen::VectorXd h(fit.theta.cols());
    for (Eigen::Index j = 0; j < h.size(); ++j) {
        const double range = fit.theta.col(j).maxCoeff() - fit.theta.col(j).minCoeff();
        h(j) = std::max(dirac_peak_width * range, 1e-9);
    }
    return h;
}

namespace {

/// Cholesky of Sigma + B H B', the covariance of S with the peak integrated out.
Eigen::LLT<Eigen::MatrixXd> marginal_chol(const GlmFit& fit, const Eigen::VectorXd& h) {
    const Eigen::MatrixXd cov = fit.sigma + fit.B * h.array().square().matrix().asDiagonal() * fit.B.transpose();
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericalError("GLM covariance is not positive definite");
    return llt;
}

/// log N(obs; c + B theta_j, cov) for every peak j.
Eigen::VectorXd peak_log_densities(const GlmFit& fit, const Eigen::LLT<Eigen::MatrixXd>& llt,
                                   const Eigen::VectorXd& obs) {
    const Eigen::Index n = fit.theta.rows();
    const Eigen::Index s = fit.c.size();
    // Residuals for all peaks at once, whitened by the Cholesky factor.
    Eigen::MatrixXd resid = (-fit.B * fit.theta.transpose()).colwise() + (obs - fit.c);
    llt.matrixL().solveInPlace(resid);
    const Eigen::MatrixXd L = llt.matrixL();
    const double log_det = 2.0 * L.diagonal().array().log().sum();
    const double base = -0.5 * (static_cast<double>(s) * kLog2Pi + log_det);
    Eigen::VectorXd out(n);
    for (Eigen::Index j = 0; j < n; ++j) out(j) = base - 0.5 * resid.col(j).squaredNorm();
    return out;
}

double log_mean_exp(const Eigen::VectorXd& v) {
    return stats::log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

}  // namespace

GlmPosterior::GlmPosterior(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width) {
    if (obs.size() != fit.c.size()) throw ConfigError("observation and GLM fit disagree on the number of statistics");
    const Eigen::VectorXd h = peak_widths(fit, dirac_peak_width);
    const auto llt = marginal_chol(fit, h);
    const Eigen::VectorXd logw = peak_log_densities(fit, llt, obs);
    log_marginal_ = log_mean_exp(logw);
    weights_ = (logw.array() - stats::log_sum_exp(logw)).exp();

    Eigen::LLT<Eigen::MatrixXd> sigma_llt(fit.sigma);
    if (sigma_llt.info() != Eigen::Success) throw NumericalError("GLM residual covariance is not positive definite");
    const Eigen::MatrixXd sinv_b = sigma_llt.solve(fit.B);  // Sigma^-1 B
    const Eigen::VectorXd hinv = h.array().square().inverse();
    Eigen::MatrixXd precision = fit.B.transpose() * sinv_b;
    precision.diagonal() += hinv;
    Eigen::LLT<Eigen::MatrixXd> prec_llt(precision);
    if (prec_llt.info() != Eigen::Success) throw NumericalError("GLM posterior precision is not positive definite");
    T_ = prec_llt.solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
    const Eigen::VectorXd shift = sinv_b.transpose() * (obs - fit.c);
    Eigen::MatrixXd rhs = fit.theta.transpose();  // params x peaks
    rhs.array().colwise() *= hinv.array();
    rhs.colwise() += shift;
    means_ = (T_ * rhs).transpose();
}

double GlmPosterior::marginal_unit(Eigen::Index j, double u) const {
    const double sd = std::sqrt(T_(j, j));
    double total = 0.0;
    for (Eigen::Index k = 0; k < means_.rows(); ++k) {
        if (weights_(k) == 0.0) continue;
        const double z = (u - means_(k, j)) / sd;
        total += weights_(k) * std::exp(-0.5 * z * z);
    }
    return total / (sd * std::sqrt(2.0 * M_PI));
}

double GlmPosterior::marginal_cdf_unit(Eigen::Index j, double u) const {
    const double sd = std::sqrt(T_(j, j));
    double total = 0.0;
    for (Eigen::Index k = 0; k < means_.rows(); ++k) {
        if (weights_(k) == 0.0) continue;
        total += weights_(k) * stats::normal_cdf((u - means_(k, j)) / sd);
    }
    return total;
}

double GlmPosterior::joint_unit(const std::vector<Eigen::Index>& which, const Eigen::VectorXd& u) const {
    const auto d = static_cast<Eigen::Index>(which.size());
    Eigen::MatrixXd sub(d, d);
    for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) sub(a, b) = T_(which[static_cast<std::size_t>(a)], which[static_cast<std::size_t>(b)]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(sub);
    const Eigen::MatrixXd L = llt.matrixL();
    const double norm = std::exp(-0.5 * static_cast<double>(d) * kLog2Pi - L.diagonal().array().log().sum());
    double total = 0.0;
    Eigen::VectorXd r(d);
    for (Eigen::Index k = 0; k < means_.rows(); ++k) {
        if (weights_(k) == 0.0) continue;
        for (Eigen::Index a = 0; a < d; ++a) r(a) = u(a) - means_(k, which[static_cast<std::size_t>(a)]);
        L.triangularView<Eigen::Lower>().solveInPlace(r);
        total += weights_(k) * std::exp(-0.5 * r.squaredNorm());
    }
    return total * norm;
}

double glm_log_marginal_density(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width) {
    const auto llt = marginal_chol(fit, peak_widths(fit, dirac_peak_width));
    return log_mean_exp(peak_log_densities(fit, llt, obs));
}

double glm_marginal_density(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width) {
    return std::exp(glm_log_marginal_density(fit, obs, dirac_peak_width));
}

std::vector<double> glm_marginal_densities(const GlmFit& fit, const Eigen::MatrixXd& obs, double dirac_peak_width) {
    const auto llt = marginal_chol(fit, peak_widths(fit, dirac_peak_width));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(obs.rows()));
    for (Eigen::Index i = 0; i < obs.rows(); ++i) {
        out.push_back(std::exp(log_mean_exp(peak_log_densities(fit, llt, obs.row(i).transpose()))));
    }
    return out;
}

std::pair<double, double> grid_bounds(const RetainedSet& retained, Eigen::Index j) {
    const double lo = retained.params.col(j).minCoeff();
    const double hi = retained.params.col(j).maxCoeff();
    double pad = 0.1 * (hi - lo);
    if (!(pad > 0.0)) pad = 0.05 * (retained.param_upper(j) - retained.param_lower(j));
    return {std::max(lo - pad, retained.param_lower(j)), std::min(hi + pad, retained.param_upper(j))};
}

std::vector<Grid1D> glm_marginals(const GlmFit& fit, const GlmPosterior& posterior, const RetainedSet& retained,
                                  std::size_t points) {
    std::vector<Grid1D> out;
    for (Eigen::Index j = 0; j < fit.theta.cols(); ++j) {
        const auto [lo, hi] = grid_bounds(retained, j);
        Grid1D g;
        g.x = linspace(lo, hi, points);
        g.density.reserve(points);
        for (double x : g.x) g.density.push_back(posterior.marginal_unit(j, fit.scaling.to_unit(j, x)));
        normalize(g);
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<double> hdi_levels(const std::vector<double>& mass) {
    std::vector<std::size_t> order(mass.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mass[a] > mass[b]; });
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    std::vector<double> out(mass.size());
    double running = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        // Cells of equal mass share one level.
        std::size_t j = i;
        double block = 0.0;
        while (j < order.size() && mass[order[j]] == mass[order[i]]) block += mass[order[j++]];
        running += block;
        for (std::size_t k = i; k < j; ++k) out[order[k]] = std::min(running / total, 1.0);
        i = j;
    }
    return out;
}

JointGrid glm_joint(const GlmFit& fit, const GlmPosterior& posterior, const RetainedSet& retained,
                    const std::vector<Eigen::Index>& params, std::size_t points) {
    if (params.size() < 2 || params.size() > 4) {
        throw ConfigError("joint posteriors are limited to 2 to 4 parameters, got " + std::to_string(params.size()));
    }
    for (auto j : params) {
        if (j < 0 || j >= fit.theta.cols()) throw ConfigError("joint posterior parameter index out of range");
    }
    JointGrid out;
    out.params = params;
    std::size_t total = 1;
    for (auto j : params) {
        const auto [lo, hi] = grid_bounds(retained, j);
        out.axes.push_back(linspace(lo, hi, points));
        total *= points;
    }
    out.density.resize(total);
    const auto d = static_cast<Eigen::Index>(params.size());
    Eigen::VectorXd u(d);
    double volume = 1.0;
    for (std::size_t a = 0; a < params.size(); ++a) {
        volume *= points > 1 ? (out.axes[a].back() - out.axes[a].front()) / static_cast<double>(points - 1) : 1.0;
    }
    double jacobian = 1.0;
    for (auto j : params) jacobian /= fit.scaling.width(j);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rest = idx;
        for (Eigen::Index a = 0; a < d; ++a) {
            const std::size_t k = rest % points;
            rest /= points;
            u(a) = fit.scaling.to_unit(params[static_cast<std::size_t>(a)], out.axes[static_cast<std::size_t>(a)][k]);
        }
        out.density[idx] = posterior.joint_unit(params, u) * jacobian;
    }
    // Normalize over the grid cells so the densities integrate to one.
    const double mass = std::accumulate(out.density.begin(), out.density.end(), 0.0) * volume;
    if (!(mass > 0.0)) throw NumericalError("joint posterior has no mass on its grid");
    for (auto& v : out.density) v /= mass;
    out.hdi = hdi_levels(out.density);
    return out;
}

}  // namespace abctk
