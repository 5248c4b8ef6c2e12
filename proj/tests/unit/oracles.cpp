#include "unit/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracle {

Eigen::VectorXd solve(Eigen::MatrixXd a, Eigen::VectorXd b) {
    const auto n = a.rows();
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        for (Eigen::Index r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (std::abs(a(pivot, col)) < 1e-300) throw std::runtime_error("singular system");
        a.row(col).swap(a.row(pivot));
        std::swap(b(col), b(pivot));
        for (Eigen::Index r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            for (Eigen::Index k = col; k < n; ++k) a(r, k) -= f * a(col, k);
            b(r) -= f * b(col);
        }
    }
    Eigen::VectorXd x(n);
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double acc = b(r);
        for (Eigen::Index k = r + 1; k < n; ++k) acc -= a(r, k) * x(k);
        x(r) = acc / a(r, r);
    }
    return x;
}

Eigen::MatrixXd wls(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::VectorXd& w) {
    const auto n = x.rows();
    const auto p = x.cols() + 1;
    Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd xtwy = Eigen::MatrixXd::Zero(p, y.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> row(static_cast<std::size_t>(p));
        row[0] = 1.0;
        for (Eigen::Index j = 1; j < p; ++j) row[static_cast<std::size_t>(j)] = x(i, j - 1);
        for (Eigen::Index a = 0; a < p; ++a) {
            for (Eigen::Index b = 0; b < p; ++b) xtwx(a, b) += w(i) * row[static_cast<std::size_t>(a)] * row[static_cast<std::size_t>(b)];
            for (Eigen::Index c = 0; c < y.cols(); ++c) xtwy(a, c) += w(i) * row[static_cast<std::size_t>(a)] * y(i, c);
        }
    }
    Eigen::MatrixXd out(p, y.cols());
    for (Eigen::Index c = 0; c < y.cols(); ++c) out.col(c) = solve(xtwx, xtwy.col(c));
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> ols(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
    const Eigen::MatrixXd coef = wls(x, y, Eigen::VectorXd::Ones(x.rows()));
    const auto n = x.rows();
    Eigen::MatrixXd resid(n, y.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < y.cols(); ++c) {
            double fitted = coef(0, c);
            for (Eigen::Index j = 0; j < x.cols(); ++j) fitted += coef(j + 1, c) * x(i, j);
            resid(i, c) = y(i, c) - fitted;
        }
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(y.cols(), y.cols());
    for (Eigen::Index a = 0; a < y.cols(); ++a) {
        for (Eigen::Index b = 0; b < y.cols(); ++b) {
            double acc = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) acc += resid(i, a) * resid(i, b);
            cov(a, b) = acc / static_cast<double>(n - x.cols() - 1);
        }
    }
    return {coef, cov};
}

double tukey_depth_2d(const Eigen::MatrixXd& points, const Eigen::Vector2d& q) {
    const auto n = points.rows();
    // Depth only changes where a direction becomes perpendicular to some p_i - q; test both
    // sides of every such angle plus the angles themselves.
    std::vector<double> angles;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double dx = points(i, 0) - q(0);
        const double dy = points(i, 1) - q(1);
        if (dx == 0.0 && dy == 0.0) continue;
        const double a = std::atan2(dy, dx);
        for (double base : {a + M_PI / 2, a - M_PI / 2}) {
            for (double eps : {-1e-9, 0.0, 1e-9}) angles.push_back(base + eps);
        }
    }
    if (angles.empty()) angles.push_back(0.0);
    std::size_t best = static_cast<std::size_t>(n);
    for (double a : angles) {
        const double ux = std::cos(a), uy = std::sin(a);
        std::size_t count = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (ux * (points(i, 0) - q(0)) + uy * (points(i, 1) - q(1)) >= 0.0) ++count;
        }
        best = std::min(best, count);
    }
    return static_cast<double>(best) / static_cast<double>(n);
}

std::vector<std::size_t> smallest(const std::vector<double>& d, std::size_t k) {
    std::vector<std::pair<double, std::size_t>> pairs;
    for (std::size_t i = 0; i < d.size(); ++i) pairs.emplace_back(d[i], i);
    std::sort(pairs.begin(), pairs.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k; ++i) out.push_back(pairs[i].second);
    return out;
}

Eigen::MatrixXd pls_scores(Eigen::MatrixXd x, Eigen::MatrixXd y, int k) {
    Eigen::MatrixXd scores(x.rows(), k);
    for (int c = 0; c < k; ++c) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(x.transpose() * y, Eigen::ComputeThinU);
        const Eigen::VectorXd w = svd.matrixU().col(0);
        const Eigen::VectorXd t = x * w;
        const Eigen::VectorXd p = x.transpose() * t / t.squaredNorm();
        const Eigen::VectorXd q = y.transpose() * t / t.squaredNorm();
        x -= t * p.transpose();
        y -= t * q.transpose();
        scores.col(c) = t;
    }
    return scores;
}

std::pair<double, double> mixture_marginal_density(const Eigen::VectorXd& c, const Eigen::MatrixXd& b,
                                                   const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& theta,
                                                   const Eigen::VectorXd& h, const Eigen::VectorXd& s, int draws,
                                                   std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_int_distribution<Eigen::Index> pick(0, theta.rows() - 1);
    const Eigen::MatrixXd inv = sigma.inverse();
    const double norm = 1.0 / std::sqrt(std::pow(2.0 * M_PI, static_cast<double>(s.size())) * sigma.determinant());
    double sum = 0.0, sum2 = 0.0;
    Eigen::VectorXd t(theta.cols());
    for (int i = 0; i < draws; ++i) {
        const auto j = pick(rng);
        for (Eigen::Index a = 0; a < t.size(); ++a) t(a) = theta(j, a) + h(a) * z(rng);
        const Eigen::VectorXd r = s - c - b * t;
        const double v = norm * std::exp(-0.5 * r.dot(inv * r));
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / draws;
    const double var = sum2 / draws - mean * mean;
    return {mean, std::sqrt(var / draws)};
}

double quantile7(std::vector<double> x, double p) {
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, x.size() - 1);
    return x[lo] + (h - static_cast<double>(lo)) * (x[hi] - x[lo]);
}

}  // namespace oracle
