#pragma once

// Independent reference implementations used to check the library. They favour the most
// literal formulation over speed and share no code with core/.

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Gaussian elimination with partial pivoting on a copy of A.
Eigen::VectorXd solve(Eigen::MatrixXd a, Eigen::VectorXd b);

/// Weighted least squares of y on [1, x] through the normal equations; one column per y column.
Eigen::MatrixXd wls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& w);

/// Unweighted least squares of y on [1, x]; returns (intercept; slopes) per y column and the
/// residual covariance with divisor n - p - 1.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

/// Exact halfspace depth of q in a 2-D cloud: scans every critical direction.
double tukey_depth_2d(const Eigen::MatrixXd& points, const Eigen::Vector2d& q);

/// Indices of the k smallest values after a full stable sort.
std::vector<std::size_t> smallest(const std::vector<double>& d, std::size_t k);

/// PLS2 scores computed by deflating X and Y and taking the leading singular vector of X'Y.
Eigen::MatrixXd pls_scores(Eigen::MatrixXd x, Eigen::MatrixXd y, int k);

/// Monte Carlo estimate (mean, standard error) of the mixture marginal density
/// mean_j integral N(s; c + B t, Sigma) N(t; theta_j, diag(h^2)) dt.
std::pair<double, double> mixture_marginal_density(const Eigen::VectorXd& c, const Eigen::MatrixXd& b,
                                                   const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& theta,
                                                   const Eigen::VectorXd& h, const Eigen::VectorXd& s, int draws,
                                                   std::uint64_t seed);

/// Type-7 sample quantile by explicit interpolation.
double quantile7(std::vector<double> x, double p);

}  // namespace oracle
