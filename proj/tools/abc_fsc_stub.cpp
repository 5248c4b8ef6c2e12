// Stand-in for a fastsimcoal2 run: `abc_fsc_stub -i <model>.par [ignored flags]` writes the
// unfolded derived-allele SFS of one sample to <model>/<model>_DAFpop0.obs.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "abctk/builtin_models.hpp"
#include "abctk/error.hpp"
#include "abctk/popgen.hpp"
#include "abctk/random.hpp"

int main(int argc, char** argv) {
    std::string par;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "-i") par = argv[i + 1];
    }
    if (par.empty()) {
        std::fprintf(stderr, "usage: abc_fsc_stub -i <file.par> [-s seed] [other flags ignored]\n");
        return 1;
    }
    try {
        std::ifstream in(par);
        if (!in) throw abctk::IoError("cannot read '" + par + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        const auto text = ss.str();
        const auto model = abctk::parse_growth_par(text, par);

        // The rendered file carries the parameter values, so it doubles as the seed.
        abctk::Rng rng = abctk::make_stream(std::hash<std::string>{}(text), 0);
        const auto sfs = abctk::simulate_sfs(model, rng);

        const auto stem = std::filesystem::path(par).stem().string();
        std::filesystem::create_directories(stem);
        const auto out_path = std::filesystem::path(stem) / (stem + "_DAFpop0.obs");
        std::ofstream out(out_path);
        out << abctk::format_daf(sfs);
        if (!out) throw abctk::IoError("cannot write '" + out_path.string() + "'");
    } catch (const std::exception& e) {
        std::fprintf(stderr, "abc_fsc_stub: %s\n", e.what());
        return 2;
    }
    return 0;
}
