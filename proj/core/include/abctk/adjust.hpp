#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "abctk/grid.hpp"
#include "abctk/rejection.hpp"

namespace abctk {

/// Retained parameters corrected for the offset between their statistics and the observation.
struct AdjustedSample {
    std::vector<std::string> param_names;
    Eigen::MatrixXd adjusted;    // retained x params
    Eigen::MatrixXd unadjusted;  // retained x params
    Eigen::VectorXd weights;     // sums to one
};

/// Epanechnikov weights 1 - (d / epsilon)^2 (uniform when epsilon is zero), normalized.
Eigen::VectorXd epanechnikov_weights(const std::vector<double>& distances, double epsilon);

/// Weighted least squares of the columns of `y` on [1, x]; returns (1 + cols(x)) x cols(y).
/// With `ridge` set, that value is added to the diagonal of every non-intercept term.
/// Throws CollinearityError for a singular design without ridge.
Eigen::MatrixXd weighted_regression(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& w,
                                    std::optional<double> ridge = std::nullopt);

/// Local-linear regression adjustment of a retained set.
AdjustedSample loclinear_adjust(const RetainedSet& retained);

/// Ridge-regularized variant; lambda applies on the standardized statistic scale.
AdjustedSample ridge_adjust(const RetainedSet& retained, double lambda = 1e-4);

/// Weighted Gaussian kernel density on `points` equally spaced values of [lo, hi], with
/// Silverman's bandwidth computed from the weighted spread and the effective sample size.
Grid1D weighted_kde(const Eigen::VectorXd& values, const Eigen::VectorXd& weights, double lo, double hi,
                    std::size_t points = 512);

/// KDE of every adjusted parameter over its padded range, clipped to the table bounds.
std::vector<Grid1D> adjusted_densities(const AdjustedSample& sample, const RetainedSet& retained,
                                       std::size_t points = 512);

}  // namespace abctk
