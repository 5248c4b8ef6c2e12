// `abc_calc_popstats <DAF file> [output]`: SFS statistics of a derived-allele frequency file,
// written as a header line and a value line (default summary_stats-temp.txt).
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "abctk/builtin_models.hpp"
#include "abctk/error.hpp"
#include "abctk/popgen.hpp"

int main(int argc, char** argv) {
    if (argc < 2 || argc > 3) {
        std::fprintf(stderr, "usage: abc_calc_popstats <DAF file> [output]\n");
        return 1;
    }
    const std::string input = argv[1];
    const std::string output = argc == 3 ? argv[2] : "summary_stats-temp.txt";
    try {
        std::ifstream in(input);
        if (!in) throw abctk::IoError("cannot read '" + input + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto stats = abctk::sfs_stats(abctk::parse_daf(ss.str(), input));
        std::ofstream out(output);
        out << abctk::format_sfs_stats(stats);
        if (!out) throw abctk::IoError("cannot write '" + output + "'");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "abc_calc_popstats: %s\n", e.what());
        return 2;
    }
    return 0;
}
