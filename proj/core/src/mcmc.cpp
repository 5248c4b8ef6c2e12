#include "abctk/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/stats.hpp"

namespace abctk {

Eigen::VectorXd StatPipeline::transform(const SimOutput& out) const {
    ObservedStats s{out.names, out.values};
    if (boosting) s = boost(s);
    if (linear_comb) {
        s = abctk::transform(s, *linear_comb, num_linear_comb ? num_linear_comb : linear_comb->components(), do_box_cox);
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(names.size()));
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto it = std::find(s.names.begin(), s.names.end(), names[j]);
        if (it == s.names.end()) throw SimulatorError("simulation did not produce statistic '" + names[j] + "'");
        v(static_cast<Eigen::Index>(j)) = s.values[static_cast<std::size_t>(it - s.names.begin())];
    }
    return v;
}

double StatPipeline::distance(const SimOutput& out) const {
    return (standardizer.apply(transform(out)) - obs).norm();
}

double reflect(double x, double lower, double upper) {
    if (!(upper > lower)) return lower;
    const double span = upper - lower;
    // Fold onto a period of twice the span, then mirror the upper half.
    double y = std::fmod(x - lower, 2.0 * span);
    if (y < 0.0) y += 2.0 * span;
    return y <= span ? lower + y : upper - (y - span);
}

Calibration calibrate(const PriorSampler& sampler, Simulator& simulator, const ObservedStats& obs_raw,
                      const McmcConfig& config) {
    if (config.n_calibration < 100) throw ConfigError("numCaliSims must be at least 100");
    const auto keep = static_cast<std::size_t>(std::ceil(config.threshold_prop * static_cast<double>(config.n_calibration) - 1e-9));
    if (!(config.threshold_prop > 0.0 && config.threshold_prop <= 1.0) || keep < 10) {
        throw ConfigError("thresholdProp * numCaliSims must retain at least 10 calibration simulations");
    }
    Calibration cal;
    cal.pipeline.boosting = config.boosting;
    cal.pipeline.linear_comb = config.linear_comb;
    cal.pipeline.num_linear_comb = config.num_linear_comb;
    cal.pipeline.do_box_cox = config.do_box_cox;

    ObservedStats obs = obs_raw;
    if (config.boosting) obs = boost(obs);
    if (config.linear_comb) {
        obs = transform(obs, *config.linear_comb,
                        config.num_linear_comb ? config.num_linear_comb : config.linear_comb->components(), config.do_box_cox);
    }
    cal.pipeline.names = obs.names;

    Rng rng = make_stream(config.seed, 0);
    std::vector<std::vector<double>> raws;
    std::vector<SimOutput> outputs;
    Eigen::MatrixXd stats(static_cast<Eigen::Index>(config.n_calibration), static_cast<Eigen::Index>(obs.names.size()));
    for (std::size_t i = 0; i < config.n_calibration; ++i) {
        std::vector<double> raw;
        std::optional<ParamDraw> draw;
        while (!draw) {
            raw = sampler.sample_raw(rng);
            draw = sampler.complete(raw);
        }
        auto out = simulate_with_retry(simulator, *draw, rng, 0);
        ++cal.simulations;
        if (!out) continue;
        stats.row(static_cast<Eigen::Index>(outputs.size())) = cal.pipeline.transform(*out).transpose();
        raws.push_back(std::move(raw));
        outputs.push_back(std::move(*out));
    }
    if (outputs.size() < keep) throw SimulatorError("too many calibration simulations failed");
    stats.conservativeResize(static_cast<Eigen::Index>(outputs.size()), Eigen::NoChange);

    Eigen::VectorXd obs_vec = Eigen::Map<const Eigen::VectorXd>(obs.values.data(), static_cast<Eigen::Index>(obs.values.size()));
    cal.pipeline.standardizer = Standardizer::fit(stats, obs.names, obs_vec);
    cal.pipeline.names = cal.pipeline.standardizer.names;
    {
        // The pipeline reports only the statistics kept by the standardizer from now on.
        Standardizer& s = cal.pipeline.standardizer;
        Eigen::VectorXd kept_obs(static_cast<Eigen::Index>(s.kept.size()));
        for (std::size_t j = 0; j < s.kept.size(); ++j) kept_obs(static_cast<Eigen::Index>(j)) = obs_vec(static_cast<Eigen::Index>(s.kept[j]));
        Eigen::MatrixXd kept_stats = gather_columns(stats, s.kept);
        std::iota(s.kept.begin(), s.kept.end(), std::size_t{0});
        cal.pipeline.obs = s.apply(kept_obs);
        stats = s.apply(kept_stats);
    }
    const auto distances = distances_to(stats, cal.pipeline.obs);
    const auto order = k_smallest(distances, keep);
    cal.epsilon = distances[order.back()];

    const auto& priors = sampler.model().priors;
    cal.widths.resize(static_cast<Eigen::Index>(priors.size()));
    for (std::size_t j = 0; j < priors.size(); ++j) {
        std::vector<double> vals;
        for (auto i : order) vals.push_back(raws[i][j]);
        double w = priors[j].is_fixed() ? 0.0 : config.range_prop * stats::sd(vals);
        if (!priors[j].is_fixed() && !(w > 0.0)) w = config.range_prop * 0.01 * (priors[j].upper() - priors[j].lower());
        cal.widths(static_cast<Eigen::Index>(j)) = w;
    }

    std::size_t start = order.front();
    if (config.start == StartingPoint::random) {
        std::vector<std::size_t> inside;
        for (auto i : order) {
            if (distances[i] < cal.epsilon) inside.push_back(i);
        }
        if (inside.empty()) inside.push_back(order.front());
        std::uniform_int_distribution<std::size_t> pick(0, inside.size() - 1);
        start = inside[pick(rng)];
    }
    cal.start_raw = raws[start];
    cal.start_distance = distances[start];
    cal.start_stats = outputs[start];
    if (!(cal.start_distance < cal.epsilon)) {
        // Ties at the threshold: widen epsilon just enough for the start to qualify.
        cal.epsilon = std::nextafter(cal.start_distance, INFINITY);
    }
    log::info("calibration: epsilon " + format_number(cal.epsilon) + " from " + std::to_string(outputs.size()) +
              " simulations");
    return cal;
}

SimulationTable run_mcmc(const PriorSampler& sampler, Simulator& simulator, const Calibration& cal,
                         const McmcConfig& config, McmcReport* report) {
    if (config.chain_length == 0) throw ConfigError("numSims must be positive");
    if (config.sampling_interval == 0) throw ConfigError("mcmcSampling must be positive");
    const auto& priors = sampler.model().priors;
    Rng rng = make_stream(config.seed, 1);

    std::vector<double> current = cal.start_raw;
    auto current_draw = sampler.complete(current);
    if (!current_draw) throw ConfigError("MCMC starting point violates the rules");
    SimOutput current_stats = cal.start_stats;
    double current_distance = cal.start_distance;
    double current_prior = sampler.prior_density(current);

    McmcReport rep;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> stat_names = current_stats.names;
    std::size_t recorded = 0;
    const auto burn = static_cast<std::size_t>(
        std::floor(config.burn_in * static_cast<double>(config.chain_length / config.sampling_interval)));

    for (std::size_t step = 1; step <= config.chain_length; ++step) {
        std::vector<double> proposal = current;
        for (std::size_t j = 0; j < priors.size(); ++j) {
            const double w = cal.widths(static_cast<Eigen::Index>(j));
            if (w <= 0.0) continue;
            const double x = current[j] + w * (2.0 * uniform01(rng) - 1.0);
            proposal[j] = reflect(x, priors[j].lower(), priors[j].upper());
        }
        ++rep.steps;
        if (auto draw = sampler.complete(proposal)) {
            const double prior = sampler.prior_density(proposal);
            // Draw u before simulating so that the prior test can short-circuit.
            const double u = uniform01(rng);
            if (prior > 0.0 && u < prior / current_prior) {
                ++rep.simulations;
                if (auto out = simulate_with_retry(simulator, *draw, rng, 0)) {
                    if (out->names != stat_names) throw SimulatorError("statistic names changed during the chain");
                    const double d = cal.pipeline.distance(*out);
                    if (d < cal.epsilon) {
                        current = std::move(proposal);
                        current_draw = std::move(draw);
                        current_stats = std::move(*out);
                        current_distance = d;
                        current_prior = prior;
                        ++rep.accepted;
                    }
                }
            }
        }
        if (step == 1000 && rep.accepted * 1000 < rep.steps) {
            throw NumericalError("MCMC acceptance rate below 0.1% over the first 1000 steps; recalibrate "
                                 "(larger thresholdProp or smaller rangeProp)");
        }
        if (step % config.sampling_interval == 0) {
            if (recorded++ < burn) continue;
            std::vector<double> row = current_draw->output_values();
            row.insert(row.end(), current_stats.values.begin(), current_stats.values.end());
            row.push_back(current_distance);
            rows.push_back(std::move(row));
        }
    }
    if (report) *report = rep;
    log::info("MCMC acceptance rate " + format_number(rep.acceptance_rate()));

    SimulationTable table;
    table.column_names = current_draw->output_names();
    for (std::size_t j = 0; j < table.column_names.size(); ++j) table.param_columns.push_back(j);
    table.column_names.insert(table.column_names.end(), stat_names.begin(), stat_names.end());
    table.column_names.push_back("distance");
    table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(table.column_names.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return table;
}

}  // namespace abctk
