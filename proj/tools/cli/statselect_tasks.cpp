#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "abctk/error.hpp"
#include "abctk/greedy_search.hpp"
#include "abctk/log.hpp"
#include "abctk/statselect.hpp"
#include "abctk/table_io.hpp"
#include "common.hpp"
#include "tasks.hpp"

namespace abctk::cli {

void run_transform(RunContext& ctx) {
    auto& c = ctx.config;
    const auto def = read_linear_comb(c.required("linearCombName"));
    const auto k = c.count("numLinearComb", def.components());
    if (k == 0 || k > def.components()) {
        throw ConfigError("numLinearComb must be between 1 and " + std::to_string(def.components()));
    }
    const bool box_cox = c.flag("doBoxCox");
    const auto& input = c.required("input");
    const auto& output = c.required("output");

    const auto rows = read_observed(input);
    if (rows.empty()) throw IoError(input + ": no value lines");
    std::vector<std::string> header;
    Eigen::MatrixXd values;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto t = transform(rows[r], def, k, box_cox);
        if (r == 0) {
            header = t.names;
            values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size()));
        }
        for (std::size_t j = 0; j < t.values.size(); ++j) {
            values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = t.values[j];
        }
    }
    std::ofstream out(output);
    if (!out) throw IoError("cannot write '" + output + "'");
    write_table(out, header, values);
    log::info("wrote " + std::to_string(rows.size()) + " transformed rows to " + output);
}

void run_find_stats(RunContext& ctx) {
    auto& c = ctx.config;
    const Inputs in = load_inputs(c, false);
    if (in.tables.size() < 2) throw ConfigError("findStatsModelChoice needs simulations of at least two models");

    GreedyOptions g;
    g.validation.method = choice_method(c);
    g.validation.count = c.count("numRetained").value_or(0);
    if (g.validation.count == 0) throw ConfigError("numRetained must be a positive count");
    g.validation.tolerance = rejection_tolerance(c.number("tolerance"), g.validation.count, in);
    g.validation.dirac_peak_width = c.number("diracPeakWidth", 0.1);
    g.validation.n_val = c.count("modelChoiceValidation").value_or(0);
    if (g.validation.n_val == 0) throw ConfigError("findStatsModelChoice needs modelChoiceValidation > 0");
    g.validation.seed = sub_seed(ctx.seed, 4);
    g.validation.threads = ctx.threads;
    g.max_cor = c.number("maxCorSSFinder", 1.0);

    const auto subsets = greedy_search(in.pointers(), in.stat_names, g);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        std::string names;
        for (const auto& s : subsets[i].stats) names += (names.empty() ? "" : ",") + s;
        rows.push_back({std::to_string(i + 1), format_number(subsets[i].power), format_number(subsets[i].max_pairwise_cor),
                        std::to_string(subsets[i].stats.size()), names});
    }
    const auto prefix = c.get("outputPrefix", "ABC_GLM");
    write_tagged_text(".", OutputName{prefix, std::nullopt, OutputTag::searchStatsgreedySearch, "", std::nullopt},
                      {"rank", "power", "max_correlation", "num_stats", "statistics"}, rows);
    if (!rows.empty()) log::info("best subset: " + rows[0][4] + " (power " + rows[0][1] + ")");
}

void run_find_pls(RunContext& ctx) {
    auto& c = ctx.config;
    ReadOptions read;
    if (const auto n = c.count("maxReadSims")) read.max_rows = *n;
    auto table = read_table(c.required("simName"), c.required("params"), read);
    if (const auto obs_name = c.find("obsName"); obs_name && !obs_name->empty()) {
        const auto obs = read_observed(*obs_name);
        if (obs.empty()) throw IoError(*obs_name + ": no observations");
        std::vector<std::size_t> keep = table.param_columns;
        for (const auto& n : obs[0].names) {
            if (const auto col = table.column_index(n)) {
                if (std::find(keep.begin(), keep.end(), *col) == keep.end()) keep.push_back(*col);
            }
        }
        std::sort(keep.begin(), keep.end());
        SimulationTable sub;
        sub.values.resize(table.values.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t j = 0; j < keep.size(); ++j) {
            sub.column_names.push_back(table.column_names[keep[j]]);
            sub.values.col(static_cast<Eigen::Index>(j)) = table.values.col(static_cast<Eigen::Index>(keep[j]));
            if (std::find(table.param_columns.begin(), table.param_columns.end(), keep[j]) != table.param_columns.end()) {
                sub.param_columns.push_back(j);
            }
        }
        table = std::move(sub);
    }

    PlsOptions o;
    o.max_components = c.count("numComponents", 10);
    o.folds = c.count("folds", 10);
    o.box_cox = c.flag("doBoxCox", true);
    o.seed = sub_seed(ctx.seed, 5);
    const auto result = fit_pls(table, o);

    const auto def_path = c.get("output", "PLSdef.txt");
    std::ofstream def_out(def_path);
    if (!def_out) throw IoError("cannot write '" + def_path + "'");
    write_linear_comb(def_out, result.def);

    std::vector<std::string> header{"components"};
    for (const auto& p : result.param_names) header.push_back(p);
    Eigen::MatrixXd rmsep(result.rmsep.rows(), result.rmsep.cols() + 1);
    for (Eigen::Index k = 0; k < rmsep.rows(); ++k) {
        rmsep(k, 0) = static_cast<double>(k + 1);
        rmsep.row(k).tail(result.rmsep.cols()) = result.rmsep.row(k);
    }
    const auto rmsep_path = c.get("outputPrefix", "ABC_PLS") + "_RMSEP.txt";
    std::ofstream rmsep_out(rmsep_path);
    if (!rmsep_out) throw IoError("cannot write '" + rmsep_path + "'");
    write_table(rmsep_out, header, rmsep);
    log::info("wrote " + def_path + " and " + rmsep_path + "; " + std::to_string(result.recommended) +
              " components recommended");
}

}  // namespace abctk::cli
