#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/model_choice.hpp"
#include "abctk/rejection.hpp"
#include "abctk/stats.hpp"

namespace abctk::cli {

std::vector<const SimulationTable*> Inputs::pointers() const {
    std::vector<const SimulationTable*> out;
    for (const auto& t : tables) out.push_back(&t);
    return out;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        const auto first = item.find_first_not_of(" \t");
        if (first == std::string::npos) throw ConfigError("empty entry in list '" + text + "'");
        out.push_back(item.substr(first, item.find_last_not_of(" \t") - first + 1));
    }
    return out;
}

ChoiceMethod choice_method(const Config& config) {
    const auto m = config.get("modelChoiceMethod", "glm");
    if (m == "glm") return ChoiceMethod::glm;
    if (m == "rejection") return ChoiceMethod::rejection;
    throw ConfigError("modelChoiceMethod must be glm or rejection, got '" + m + "'");
}

double rejection_tolerance(std::optional<double> tolerance, std::size_t num_retained, const Inputs& in) {
    if (tolerance) {
        if (!(*tolerance > 0 && *tolerance <= 1)) throw ConfigError("tolerance must be in (0, 1]");
        return *tolerance;
    }
    std::size_t smallest = in.tables.front().rows();
    for (const auto& t : in.tables) smallest = std::min(smallest, t.rows());
    return std::min(1.0, static_cast<double>(num_retained) / static_cast<double>(smallest));
}

namespace {

ObservedStats restrict_to(const ObservedStats& obs, const std::vector<std::string>& names) {
    ObservedStats out;
    for (std::size_t i = 0; i < obs.names.size(); ++i) {
        if (std::find(names.begin(), names.end(), obs.names[i]) != names.end()) {
            out.names.push_back(obs.names[i]);
            out.values.push_back(obs.values[i]);
        }
    }
    return out;
}

}  // namespace

Inputs load_inputs(const Config& config, bool require_obs) {
    Inputs in;
    in.sim_names = split_models(config.required("simName"));
    auto params = split_models(config.required("params"));
    if (params.size() == 1) params.resize(in.sim_names.size(), params[0]);
    if (params.size() != in.sim_names.size()) {
        throw ConfigError("params lists " + std::to_string(params.size()) + " models but simName lists " +
                          std::to_string(in.sim_names.size()));
    }
    ReadOptions read;
    if (const auto n = config.count("maxReadSims")) read.max_rows = *n;
    for (std::size_t m = 0; m < in.sim_names.size(); ++m) {
        ReadReport report;
        in.tables.push_back(read_table(in.sim_names[m], params[m], read, &report));
        log::info("read " + std::to_string(report.rows_kept) + " simulations from " + in.sim_names[m]);
        if (in.tables.back().rows() == 0) throw IoError(in.sim_names[m] + ": no simulations");
    }
    if (in.tables.size() > 1) check_same_statistics(in.pointers());

    if (config.has("obsName") || require_obs) {
        const auto& obs_name = config.required("obsName");
        in.obs = read_observed(obs_name);
        if (in.obs.empty()) throw IoError(obs_name + ": no observations");
    } else {
        const auto names = in.tables[0].stat_names();
        in.obs.push_back(ObservedStats{names, std::vector<double>(names.size(), 0.0)});
    }
    const auto match = match_stats(in.tables[0], in.obs[0]);
    in.stat_names = match.names;

    Eigen::MatrixXd pooled(0, static_cast<Eigen::Index>(match.columns.size()));
    for (const auto& t : in.tables) {
        const auto block = gather_columns(t.values, match_stats(t, in.obs[0]).columns);
        Eigen::MatrixXd grown(pooled.rows() + block.rows(), pooled.cols());
        grown << pooled, block;
        pooled.swap(grown);
    }
    const double max_cor = config.number("maxCor", 1.0);
    if (config.flag("pruneCorrelatedStats")) {
        const auto kept = prune_correlated(pooled, max_cor);
        std::vector<std::string> names;
        for (auto k : kept) names.push_back(in.stat_names[k]);
        if (names.size() < in.stat_names.size()) {
            log::info("pruneCorrelatedStats kept " + std::to_string(names.size()) + " of " +
                      std::to_string(in.stat_names.size()) + " statistics");
        }
        in.stat_names = names;
    } else if (max_cor < 1.0) {
        const auto r = stats::correlation_matrix(pooled);
        for (Eigen::Index i = 0; i < r.rows(); ++i) {
            for (Eigen::Index j = i + 1; j < r.cols(); ++j) {
                if (std::abs(r(i, j)) > max_cor) {
                    log::warn("statistics " + in.stat_names[static_cast<std::size_t>(i)] + " and " +
                              in.stat_names[static_cast<std::size_t>(j)] + " are correlated (r = " +
                              format_number(r(i, j)) + "); consider pruneCorrelatedStats");
                }
            }
        }
    }
    for (auto& o : in.obs) o = restrict_to(o, in.stat_names);
    return in;
}

}  // namespace abctk::cli
