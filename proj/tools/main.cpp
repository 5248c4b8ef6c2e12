#include <cstdio>
#include <string>
#include <vector>

#include "cli/tasks.hpp"

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: abctk <input file> [key=value ...]\n       abctk task=<task> [key=value ...]\n");
        return 1;
    }
    return abctk::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
