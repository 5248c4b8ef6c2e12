#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "abctk/error.hpp"
#include "cli/config.hpp"
#include "cli/tasks.hpp"

using namespace abctk;
using abctk::cli::Config;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("abctk-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" ABCTK_CLI "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void simulate_toy(const fs::path& dir, const std::string& model, int seed, const std::string& out) {
    REQUIRE(run_cli(dir, "task=simulate simProgram=builtin:" + model + " estName=" ABCTK_TEST_DATA "/toy.est numSims=400 seed=" +
                             std::to_string(seed) + " outName=" + out) == 0);
}

}  // namespace

TEST_CASE("settings files: comments, lists and flags") {
    auto c = Config::from_text("// comment\ntask estimate\nsimName a.txt;b.txt\n# also a comment\nwriteRetained\n"
                               "numRetained 50\nmarDensPValue 100\n",
                               "mem");
    CHECK(c.required("task") == "estimate");
    CHECK(c.get("simName", "") == "a.txt;b.txt");
    CHECK(c.flag("writeRetained"));
    CHECK_FALSE(c.flag("plotData"));
    CHECK(c.count("numRetained", 1) == 50);
    CHECK(c.has("obsPValue"));
    CHECK_THROWS_AS(c.required("obsName"), ConfigError);
    c.set("numRetained", "fifty");
    CHECK_THROWS_AS(c.count("numRetained", 1), ConfigError);
}

TEST_CASE("command-line settings override the file") {
    const auto dir = scratch("override");
    std::ofstream(dir / "in.txt") << "task estimate\nnumRetained 50\n";
    const auto c = Config::from_args({(dir / "in.txt").string(), "numRetained=70", "quiet"});
    CHECK(c.count("numRetained", 1) == 70);
    CHECK(c.get("task", "") == "estimate");
    CHECK(c.flag("quiet"));
}

TEST_CASE("key aliases and known keys") {
    CHECK(cli::canonical_key("marDensPValue") == "obsPValue");
    CHECK(cli::canonical_key("linearComb") == "linearCombName");
    CHECK(cli::known_key("numRetained"));
    CHECK_FALSE(cli::known_key("numRetaind"));
}

TEST_CASE("error classes map to exit codes") {
    CHECK(cli::exit_code(ConfigError("x")) == 1);
    CHECK(cli::exit_code(IoError("x")) == 2);
    CHECK(cli::exit_code(NumericalError("x")) == 3);
    CHECK(cli::exit_code(CollinearityError("x")) == 3);
    CHECK(cli::exit_code(SimulatorError("x")) == 4);
}

TEST_CASE("sub-seeds are distinct per component") {
    CHECK(cli::sub_seed(1, 3) != cli::sub_seed(1, 4));
    CHECK(cli::sub_seed(1, 3) == cli::sub_seed(1, 3));
}

TEST_CASE("a settings file and the same settings on the command line give identical outputs") {
    const auto a = scratch("file"), b = scratch("args");
    for (const auto& dir : {a, b}) simulate_toy(dir, "toy-normal", 1, "sims");
    CHECK(slurp(a / "sims_sampling1.txt") == slurp(b / "sims_sampling1.txt"));
    const std::string settings = "task estimate\nsimName sims_sampling1.txt\nparams 1-2\nobsName " ABCTK_TEST_DATA
                                 "/normal.obs\nnumRetained 50\nwriteRetained\nseed 5\nobsPValue 50\n";
    std::ofstream(a / "est.txt") << settings;
    REQUIRE(run_cli(a, "est.txt") == 0);
    REQUIRE(run_cli(b, "task=estimate simName=sims_sampling1.txt params=1-2 obsName=" ABCTK_TEST_DATA
                       "/normal.obs numRetained=50 writeRetained seed=5 obsPValue=50") == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename().string();
        if (name.rfind("ABC_GLM", 0) != 0) continue;
        CHECK_MESSAGE(slurp(e.path()) == slurp(b / name), name);
        ++compared;
    }
    CHECK(compared >= 4);
    CHECK(fs::exists(a / "ABC_GLM_model0_BestSimsParamStats_Obs0.txt"));
    CHECK(fs::exists(a / "ABC_GLM_model0_MarginalPosteriorDensities_Obs0.txt"));
    CHECK(fs::exists(a / "ABC_GLM_model0_MarginalPosteriorCharacteristics_Obs0.txt"));
    CHECK(fs::exists(a / "ABC_GLM_modelFit_Obs0.txt"));
}

TEST_CASE("exit codes of failing runs") {
    const auto dir = scratch("codes");
    CHECK(run_cli(dir, "numRetained=5") == 1);
    CHECK(slurp(dir / "stderr.txt").find("task") != std::string::npos);
    CHECK(run_cli(dir, "task=estimate simName=missing.txt params=1-2 obsName=missing.obs numRetained=5") == 2);
    CHECK(run_cli(dir, "task=bogus") == 1);
    std::ofstream(dir / "fail.sh") << "#!/bin/sh\nexit 1\n";
    fs::permissions(dir / "fail.sh", fs::perms::owner_all);
    CHECK(run_cli(dir, "task=simulate simProgram=./fail.sh estName=" ABCTK_TEST_DATA "/toy.est numSims=3 seed=1") == 4);
}

TEST_CASE("unknown settings are reported and ignored") {
    const auto dir = scratch("unknown");
    simulate_toy(dir, "toy-normal", 2, "sims");
    CHECK(run_cli(dir, "task=estimate simName=sims_sampling1.txt params=1-2 obsName=" ABCTK_TEST_DATA
                       "/normal.obs numRetained=50 seed=1 numRetaind=3") == 0);
    CHECK(slurp(dir / "stderr.txt").find("numRetaind") != std::string::npos);
}

TEST_CASE("two-model estimation writes the model comparison") {
    const auto dir = scratch("models");
    simulate_toy(dir, "toy-normal", 1, "norm");
    simulate_toy(dir, "toy-uniform", 2, "unif");
    REQUIRE(run_cli(dir, "task=estimate 'simName=norm_sampling1.txt;unif_sampling1.txt' params=1-2 obsName=" ABCTK_TEST_DATA
                         "/normal.obs numRetained=50 seed=1 modelChoiceValidation=10") == 0);
    const auto fit = slurp(dir / "ABC_GLM_modelFit_Obs0.txt");
    CHECK(fit.find("posterior_probability") != std::string::npos);
    CHECK(fs::exists(dir / "ABC_GLM_model1_MarginalPosteriorDensities_Obs0.txt"));
    CHECK(fs::exists(dir / "ABC_GLM_confusionMatrix.txt"));
}
