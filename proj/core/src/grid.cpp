#include "abctk/grid.hpp"

#include <algorithm>
#include <cmath>

#include "abctk/error.hpp"

namespace abctk {

std::vector<double> linspace(double lo, double hi, std::size_t points) {
    std::vector<double> out(points);
    if (points == 1) {
        out[0] = 0.5 * (lo + hi);
        return out;
    }
    for (std::size_t i = 0; i < points; ++i) {
        out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    }
    return out;
}

double integrate(const Grid1D& g) {
    double total = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) total += 0.5 * (g.density[i] + g.density[i - 1]) * (g.x[i] - g.x[i - 1]);
    return total;
}

void normalize(Grid1D& g) {
    const double total = integrate(g);
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("posterior density has no mass on its grid");
    for (auto& d : g.density) d /= total;
}

double cdf_at(const Grid1D& g, double x) {
    if (g.size() < 2 || x <= g.x.front()) return 0.0;
    if (x >= g.x.back()) return 1.0;
    double mass = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double h = g.x[i] - g.x[i - 1];
        if (x >= g.x[i]) {
            mass += 0.5 * (g.density[i] + g.density[i - 1]) * h;
            continue;
        }
        const double t = x - g.x[i - 1];
        const double slope = (g.density[i] - g.density[i - 1]) / h;
        mass += g.density[i - 1] * t + 0.5 * slope * t * t;
        break;
    }
    return std::clamp(mass, 0.0, 1.0);
}

double quantile(const Grid1D& g, double p) {
    double mass = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double h = g.x[i] - g.x[i - 1];
        const double a = g.density[i - 1];
        const double b = g.density[i];
        const double cell = 0.5 * (a + b) * h;
        if (mass + cell < p) {
            mass += cell;
            continue;
        }
        // Solve a*t + (b-a)/(2h) * t^2 = p - mass for t in [0, h].
        const double need = p - mass;
        const double k = 0.5 * (b - a) / h;
        double t;
        if (std::abs(k) < 1e-300 || std::abs(k * h) < 1e-12 * std::max(a, 1e-300)) {
            t = a > 0.0 ? need / a : 0.0;
        } else {
            const double disc = std::max(a * a + 4.0 * k * need, 0.0);
            t = (-a + std::sqrt(disc)) / (2.0 * k);
        }
        return g.x[i - 1] + std::clamp(t, 0.0, h);
    }
    return g.x.back();
}

double density_at(const Grid1D& g, double x) {
    if (g.size() == 0 || x < g.x.front() || x > g.x.back()) return 0.0;
    const auto it = std::upper_bound(g.x.begin(), g.x.end(), x);
    if (it == g.x.end()) return g.density.back();
    const auto i = static_cast<std::size_t>(it - g.x.begin());
    const double t = (x - g.x[i - 1]) / (g.x[i] - g.x[i - 1]);
    return g.density[i - 1] + t * (g.density[i] - g.density[i - 1]);
}

double mass_above(const Grid1D& g, double threshold) {
    double mass = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        const double h = g.x[i] - g.x[i - 1];
        double a = g.density[i - 1];
        double b = g.density[i];
        if (a >= threshold && b >= threshold) {
            mass += 0.5 * (a + b) * h;
        } else if (a >= threshold || b >= threshold) {
            // The interpolant crosses the threshold once inside the cell.
            if (b > a) std::swap(a, b);
            const double frac = (a - threshold) / (a - b);
            mass += 0.5 * (a + threshold) * frac * h;
        }
    }
    return mass;
}

double hdi_level_of(const Grid1D& g, double x) {
    if (g.size() == 0 || x < g.x.front() || x > g.x.back()) return 1.0;
    return std::clamp(mass_above(g, density_at(g, x)), 0.0, 1.0);
}

Interval hdi(const Grid1D& g, double level) {
    const double peak = *std::max_element(g.density.begin(), g.density.end());
    double lo = 0.0;
    double hi = peak;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mass_above(g, mid) >= level) lo = mid;
        else hi = mid;
    }
    const double t = lo;
    Interval out{g.x.back(), g.x.front()};
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.density[i] < t) continue;
        double left = g.x[i];
        if (i > 0 && g.density[i - 1] < t) {
            left = g.x[i - 1] + (g.x[i] - g.x[i - 1]) * (t - g.density[i - 1]) / (g.density[i] - g.density[i - 1]);
        }
        double right = g.x[i];
        if (i + 1 < g.size() && g.density[i + 1] < t) {
            right = g.x[i] + (g.x[i + 1] - g.x[i]) * (g.density[i] - t) / (g.density[i] - g.density[i + 1]);
        }
        out.lower = std::min(out.lower, left);
        out.upper = std::max(out.upper, right);
    }
    return out;
}

PosteriorCharacteristics characterize(const Grid1D& g) {
    PosteriorCharacteristics c;
    const auto peak = std::max_element(g.density.begin(), g.density.end());
    c.mode = g.x[static_cast<std::size_t>(peak - g.density.begin())];
    double mean = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        // Exact first moment of the linear interpolant over the cell.
        const double x0 = g.x[i - 1], x1 = g.x[i], a = g.density[i - 1], b = g.density[i];
        mean += (x1 - x0) * (a * (2.0 * x0 + x1) + b * (x0 + 2.0 * x1)) / 6.0;
    }
    c.mean = mean;
    c.q025 = quantile(g, 0.025);
    c.q25 = quantile(g, 0.25);
    c.q50 = quantile(g, 0.5);
    c.q75 = quantile(g, 0.75);
    c.q975 = quantile(g, 0.975);
    c.median = c.q50;
    c.hdi50 = hdi(g, 0.5);
    c.hdi95 = hdi(g, 0.95);
    return c;
}

const std::vector<std::string_view>& characteristic_names() {
    static const std::vector<std::string_view> names = {
        "mode", "mean", "median", "q0.025", "q0.25", "q0.5", "q0.75", "q0.975",
        "HDI50_lower", "HDI50_upper", "HDI95_lower", "HDI95_upper"};
    return names;
}

std::vector<double> characteristic_values(const PosteriorCharacteristics& c) {
    return {c.mode, c.mean, c.median, c.q025, c.q25, c.q50, c.q75, c.q975,
            c.hdi50.lower, c.hdi50.upper, c.hdi95.lower, c.hdi95.upper};
}

}  // namespace abctk
