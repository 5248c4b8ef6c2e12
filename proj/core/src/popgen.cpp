#include "abctk/popgen.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "abctk/error.hpp"
#include "abctk/table_io.hpp"

namespace abctk {

namespace {

double number(const std::string& token, const std::string& source, const char* what) {
    const auto v = parse_double(token);
    if (!v || !std::isfinite(*v)) {
        throw IoError(source + ": " + what + " '" + token + "' is not a number (unsubstituted tag?)");
    }
    return *v;
}

}  // namespace

GrowthModel parse_growth_par(const std::string& text, const std::string& source) {
    std::vector<std::vector<std::string>> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto fields = split_fields(line);
        if (fields.empty() || fields[0].rfind("//", 0) == 0) continue;
        lines.push_back(fields);
    }
    std::size_t at = 0;
    auto next = [&](const char* what) -> const std::vector<std::string>& {
        if (at >= lines.size()) throw IoError(source + ": missing " + std::string(what));
        return lines[at++];
    };
    GrowthModel m;
    if (number(next("deme count")[0], source, "deme count") != 1.0) {
        throw IoError(source + ": only single-deme models are supported");
    }
    m.n_cur = number(next("population size")[0], source, "population size");
    m.sample_size = static_cast<std::size_t>(number(next("sample size")[0], source, "sample size"));
    number(next("growth rate")[0], source, "growth rate");
    const double matrices = number(next("migration matrix count")[0], source, "migration matrix count");
    if (matrices != 0.0) throw IoError(source + ": migration matrices are not supported");
    const auto events = static_cast<std::size_t>(number(next("historical events")[0], source, "event count"));
    if (events > 1) throw IoError(source + ": at most one historical event is supported");
    if (events == 1) {
        const auto& ev = next("historical event");
        if (ev.size() < 5) throw IoError(source + ": malformed historical event");
        m.t1 = number(ev[0], source, "event time");
        m.omega = number(ev[4], source, "event size");
    }
    m.loci = static_cast<std::size_t>(number(next("locus count")[0], source, "locus count"));
    next("linkage blocks");
    const auto& block = next("block definition");
    if (block.size() < 4 || block[0] != "DNA") throw IoError(source + ": expected a DNA block definition");
    m.sites_per_locus = static_cast<std::size_t>(number(block[1], source, "site count"));
    m.mutation_rate = number(block[3], source, "mutation rate");
    return m;
}

std::string format_daf(const Sfs& sfs) {
    std::ostringstream out;
    out << "1 observations\n";
    for (std::size_t i = 0; i < sfs.counts.size(); ++i) out << "d0_" << i << '\t';
    out << '\n';
    for (double c : sfs.counts) out << format_number(c) << '\t';
    out << '\n';
    return out.str();
}

std::string format_sfs_stats(const SfsStats& stats) {
    std::ostringstream out;
    const auto& names = sfs_stat_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "\t" : "") << names[i];
    out << '\n';
    const auto values = stats.values();
    for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "\t" : "") << format_number(values[i]);
    out << '\n';
    return out.str();
}

}  // namespace abctk
