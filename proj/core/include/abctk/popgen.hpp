#pragma once

#include <string>

#include "abctk/builtin_models.hpp"

namespace abctk {

/// Reads the single-deme subset of a fastsimcoal-style parameter file: population size,
/// sample size, at most one historical size change, locus count and DNA block length and
/// mutation rate. Lines starting with `//` are comments.
GrowthModel parse_growth_par(const std::string& text, const std::string& source);

/// Derived-allele-frequency file: a count line, a header of class names, then the counts.
std::string format_daf(const Sfs& sfs);

/// Two-line statistics file (header, values) for the five SFS statistics.
std::string format_sfs_stats(const SfsStats& stats);

}  // namespace abctk
