#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace abctk {

/// Density tabulated on increasing grid points, read as the piecewise-linear interpolant.
struct Grid1D {
    std::vector<double> x;
    std::vector<double> density;

    std::size_t size() const { return x.size(); }
};

/// `points` equally spaced values on [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t points);

/// Trapezoid integral of the interpolant.
double integrate(const Grid1D& grid);

/// Rescales the density so it integrates to one. Throws NumericalError when the mass is zero.
void normalize(Grid1D& grid);

/// Mass of the interpolant below `x` (0 left of the grid, 1 right of it).
double cdf_at(const Grid1D& grid, double x);

/// Inverse of cdf_at.
double quantile(const Grid1D& grid, double p);

double density_at(const Grid1D& grid, double x);

/// Mass of the region where the density is at least `threshold`.
double mass_above(const Grid1D& grid, double threshold);

/// Smallest HDI level whose region contains `x` (1 outside the grid).
double hdi_level_of(const Grid1D& grid, double x);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

/// Outer bounds of the highest density region of mass `level`.
Interval hdi(const Grid1D& grid, double level);

struct PosteriorCharacteristics {
    double mode = 0.0;
    double mean = 0.0;
    double median = 0.0;
    double q025 = 0.0, q25 = 0.0, q50 = 0.0, q75 = 0.0, q975 = 0.0;
    Interval hdi50;
    Interval hdi95;
};

/// Characteristics of a normalized grid density; the mode is the grid point of maximal density.
PosteriorCharacteristics characterize(const Grid1D& grid);

/// Column names matching PosteriorCharacteristics, as written to the characteristics file.
const std::vector<std::string_view>& characteristic_names();
std::vector<double> characteristic_values(const PosteriorCharacteristics& c);

}  // namespace abctk
