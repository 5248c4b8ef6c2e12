#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "abctk/grid.hpp"
#include "abctk/rejection.hpp"

namespace abctk {

/// Linear map of each parameter onto [0, 1] using the bounds of the full simulation table.
struct ParamScaling {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    double to_unit(Eigen::Index j, double x) const { return (x - lower(j)) / (upper(j) - lower(j)); }
    double from_unit(Eigen::Index j, double u) const { return lower(j) + u * (upper(j) - lower(j)); }
    double width(Eigen::Index j) const { return upper(j) - lower(j); }
};

/// Local linear model of standardized statistics given parameters: S = c + B theta + e, e ~ N(0, Sigma).
struct GlmFit {
    Eigen::VectorXd c;      // stats
    Eigen::MatrixXd B;      // stats x params
    Eigen::MatrixXd sigma;  // stats x stats
    Eigen::MatrixXd theta;  // retained parameters on the unit scale (retained x params)
    ParamScaling scaling;
};

/// Ordinary least squares on raw arrays; `theta` rows are parameter vectors, `stats` rows
/// the matching statistics. Sigma = residual covariance (divisor n - p - 1) + 1e-8 I.
GlmFit glm_fit(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& stats);

/// Fits on a retained set, mapping parameters to the unit scale first.
GlmFit glm_fit(const RetainedSet& retained);

struct GlmSettings {
    double dirac_peak_width = 0.1;
    std::size_t density_points = 100;
    std::size_t joint_points = 100;
};

/// Posterior of the Gaussian-mixture prior (one peak per retained parameter vector) under
/// the fitted likelihood, for one observation. Every component shares covariance `T`.
class GlmPosterior {
  public:
    GlmPosterior(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width);

    /// log of the marginal density of `obs`, averaged over the prior peaks.
    double log_marginal_density() const { return log_marginal_; }

    /// Posterior density of parameter j on the unit scale (untruncated mixture).
    double marginal_unit(Eigen::Index j, double u) const;
    double marginal_cdf_unit(Eigen::Index j, double u) const;

    /// Joint posterior density of the parameter subset `which` at unit-scale point `u`.
    double joint_unit(const std::vector<Eigen::Index>& which, const Eigen::VectorXd& u) const;

    const Eigen::VectorXd& weights() const { return weights_; }
    const Eigen::MatrixXd& means() const { return means_; }
    const Eigen::MatrixXd& covariance() const { return T_; }

  private:
    Eigen::VectorXd weights_;  // normalized mixture weights
    Eigen::MatrixXd means_;    // peaks x params
    Eigen::MatrixXd T_;
    double log_marginal_ = 0.0;
};

/// Mixture bandwidths: dirac_peak_width times the retained range of each unit-scale parameter.
Eigen::VectorXd peak_widths(const GlmFit& fit, double dirac_peak_width);

/// Marginal density of `obs` under the fit: mean over peaks of N(obs; c + B theta_j, Sigma + B H B').
double glm_marginal_density(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width);
double glm_log_marginal_density(const GlmFit& fit, const Eigen::VectorXd& obs, double dirac_peak_width);

/// Same, evaluated for many observations sharing the fit (rows of `obs`).
std::vector<double> glm_marginal_densities(const GlmFit& fit, const Eigen::MatrixXd& obs, double dirac_peak_width);

/// Evaluation bounds on the raw scale: retained range padded by 10% and clipped to the table range.
std::pair<double, double> grid_bounds(const RetainedSet& retained, Eigen::Index j);

/// Normalized marginal posteriors on the raw parameter scale, one per parameter.
std::vector<Grid1D> glm_marginals(const GlmFit& fit, const GlmPosterior& posterior, const RetainedSet& retained,
                                  std::size_t points);

struct JointGrid {
    std::vector<Eigen::Index> params;
    std::vector<std::vector<double>> axes;  // raw scale, one per parameter
    std::vector<double> density;            // first parameter varies fastest
    std::vector<double> hdi;                // smallest HDI level containing each point
};

/// Joint posterior of 2 to 4 parameters on a tensor grid of `points` per axis.
JointGrid glm_joint(const GlmFit& fit, const GlmPosterior& posterior, const RetainedSet& retained,
                    const std::vector<Eigen::Index>& params, std::size_t points);

/// HDI level of every cell given cell masses: mass of all cells at least as dense.
std::vector<double> hdi_levels(const std::vector<double>& mass);

}  // namespace abctk
