#include "abctk/adjust.hpp"

#include <algorithm>
#include <cmath>

#include "abctk/error.hpp"

namespace abctk {

Eigen::VectorXd epanechnikov_weights(const std::vector<double>& distances, double epsilon) {
    const auto n = static_cast<Eigen::Index>(distances.size());
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double r = epsilon > 0.0 ? distances[static_cast<std::size_t>(i)] / epsilon : 0.0;
        w(i) = std::max(0.0, 1.0 - r * r);
    }
    const double total = w.sum();
    if (!(total > 0.0)) {
        // Every retained point sits on the boundary; fall back to equal weights.
        w.setConstant(1.0 / static_cast<double>(n));
        return w;
    }
    return w / total;
}

Eigen::MatrixXd weighted_regression(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& w,
                                    std::optional<double> ridge) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    Eigen::MatrixXd design(n, k + 1);
    design.col(0).setOnes();
    design.rightCols(k) = x;
    Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
    Eigen::MatrixXd normal = xtw * design;
    if (ridge) {
        normal.diagonal().tail(k).array() += *ridge;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    lu.setThreshold(1e-10);
    if (!ridge && (lu.rank() < k + 1)) {
        throw CollinearityError("design matrix of the regression adjustment is collinear; use ridge");
    }
    if (ldlt.info() != Eigen::Success) throw NumericalError("regression normal equations could not be solved");
    return ldlt.solve(xtw * y);
}

namespace {

AdjustedSample adjust(const RetainedSet& retained, std::optional<double> ridge) {
    const Eigen::Index n = static_cast<Eigen::Index>(retained.size());
    Eigen::MatrixXd offset = retained.stats.rowwise() - retained.obs.transpose();

    AdjustedSample out;
    out.param_names = retained.param_names;
    out.unadjusted = retained.params;
    out.weights = epanechnikov_weights(retained.distances, retained.epsilon);

    // Columns that never differ from the observation carry no information.
    std::vector<Eigen::Index> used;
    for (Eigen::Index j = 0; j < offset.cols(); ++j) {
        if (offset.col(j).cwiseAbs().maxCoeff() > 0.0) used.push_back(j);
    }
    if (used.empty()) {
        out.adjusted = out.unadjusted;
        return out;
    }
    if (!ridge && n <= static_cast<Eigen::Index>(used.size()) + 1) {
        throw NumericalError("regression adjustment needs more retained simulations than statistics + 1");
    }
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(used.size()));
    for (std::size_t j = 0; j < used.size(); ++j) x.col(static_cast<Eigen::Index>(j)) = offset.col(used[j]);

    const Eigen::MatrixXd coef = weighted_regression(x, retained.params, out.weights, ridge);
    const Eigen::MatrixXd beta = coef.bottomRows(coef.rows() - 1);
    out.adjusted = retained.params - x * beta;
    return out;
}

}  // namespace

AdjustedSample loclinear_adjust(const RetainedSet& retained) { return adjust(retained, std::nullopt); }

AdjustedSample ridge_adjust(const RetainedSet& retained, double lambda) {
    if (!(lambda >= 0.0)) throw ConfigError("ridge lambda must be non-negative");
    return adjust(retained, lambda);
}

Grid1D weighted_kde(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double lo, double hi,
                    std::size_t points) {
    const double wsum = weights.sum();
    const Eigen::VectorXd w = weights / wsum;
    const double mean = w.dot(values);
    const double var = w.dot((values.array() - mean).square().matrix());
    const double n_eff = 1.0 / w.squaredNorm();
    double bw = 1.06 * std::sqrt(var) * std::pow(n_eff, -0.2);
    if (!(bw > 0.0)) bw = std::max(1e-3 * (hi - lo), 1e-12);
    Grid1D g;
    g.x = linspace(lo, hi, points);
    g.density.assign(points, 0.0);
    const double norm = 1.0 / (bw * std::sqrt(2.0 * M_PI));
    for (std::size_t i = 0; i < points; ++i) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < values.size(); ++k) {
            const double z = (g.x[i] - values(k)) / bw;
            total += w(k) * std::exp(-0.5 * z * z);
        }
        g.density[i] = total * norm;
    }
    normalize(g);
    return g;
}

std::vector<Grid1D> adjusted_densities(const AdjustedSample& sample, const RetainedSet& retained, std::size_t points) {
    std::vector<Grid1D> out;
    for (Eigen::Index j = 0; j < sample.adjusted.cols(); ++j) {
        const double lo = sample.adjusted.col(j).minCoeff();
        const double hi = sample.adjusted.col(j).maxCoeff();
        double pad = 0.1 * (hi - lo);
        if (!(pad > 0.0)) pad = 0.05 * (retained.param_upper(j) - retained.param_lower(j));
        if (!(pad > 0.0)) pad = 1e-6;
        double from = std::max(lo - pad, retained.param_lower(j));
        double to = std::min(hi + pad, retained.param_upper(j));
        if (!(from < to)) {
            // Adjusted values left the prior support entirely; show them unclipped.
            from = lo - pad;
            to = hi + pad;
        }
        out.push_back(weighted_kde(sample.adjusted.col(j), sample.weights, from, to, points));
    }
    return out;
}

}  // namespace abctk
