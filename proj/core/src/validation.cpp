#include "abctk/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/parallel.hpp"

namespace abctk {

double marginal_density_pvalue(const GlmFit& fit, const RetainedSet& retained, const Eigen::VectorXd& obs,
                               std::size_t n_check, double dirac_peak_width, double* obs_density) {
    n_check = std::min(n_check, retained.size());
    if (n_check == 0) throw ConfigError("marginal density P-value needs at least one retained simulation");
    const double log_obs = glm_log_marginal_density(fit, obs, dirac_peak_width);
    if (obs_density) *obs_density = std::exp(log_obs);
    std::size_t below = 0;
    for (std::size_t i = 0; i < n_check; ++i) {
        const Eigen::VectorXd s = retained.stats.row(static_cast<Eigen::Index>(i)).transpose();
        if (glm_log_marginal_density(fit, s, dirac_peak_width) <= log_obs) ++below;
    }
    return static_cast<double>(below) / static_cast<double>(n_check);
}

Eigen::MatrixXd random_directions(Eigen::Index dim, std::size_t count, Rng& rng) {
    std::normal_distribution<double> normal;
    Eigen::MatrixXd out(dim, static_cast<Eigen::Index>(count));
    for (Eigen::Index k = 0; k < out.cols(); ++k) {
        double norm = 0.0;
        do {
            for (Eigen::Index i = 0; i < dim; ++i) out(i, k) = normal(rng);
            norm = out.col(k).norm();
        } while (norm < 1e-12);
        out.col(k) /= norm;
    }
    return out;
}

std::vector<double> tukey_depths(const Eigen::MatrixXd& points, const Eigen::MatrixXd& queries,
                                 const Eigen::MatrixXd& directions) {
    const auto n = static_cast<double>(points.rows());
    const Eigen::MatrixXd proj = points * directions;   // points x directions
    const Eigen::MatrixXd qproj = queries * directions;  // queries x directions
    std::vector<double> depth(static_cast<std::size_t>(queries.rows()), 0.5);
    std::vector<double> column(static_cast<std::size_t>(points.rows()));
    for (Eigen::Index k = 0; k < directions.cols(); ++k) {
        for (Eigen::Index i = 0; i < proj.rows(); ++i) column[static_cast<std::size_t>(i)] = proj(i, k);
        std::sort(column.begin(), column.end());
        for (Eigen::Index q = 0; q < queries.rows(); ++q) {
            const double v = qproj(q, k);
            const auto le = std::upper_bound(column.begin(), column.end(), v) - column.begin();
            const auto ge = column.end() - std::lower_bound(column.begin(), column.end(), v);
            const double d = static_cast<double>(std::min(le, ge)) / n;
            auto& slot = depth[static_cast<std::size_t>(q)];
            slot = std::min(slot, d);
        }
    }
    return depth;
}

double tukey_pvalue(const Eigen::MatrixXd& points, const Eigen::VectorXd& obs, std::size_t n_check,
                    std::size_t projections, Rng& rng, double* obs_depth) {
    n_check = std::min<std::size_t>(n_check, static_cast<std::size_t>(points.rows()));
    if (n_check == 0) throw ConfigError("Tukey P-value needs at least one retained simulation");
    const Eigen::MatrixXd directions = random_directions(points.cols(), projections, rng);
    Eigen::MatrixXd queries(static_cast<Eigen::Index>(n_check) + 1, points.cols());
    queries.row(0) = obs.transpose();
    queries.bottomRows(static_cast<Eigen::Index>(n_check)) = points.topRows(static_cast<Eigen::Index>(n_check));
    const auto depth = tukey_depths(points, queries, directions);
    if (obs_depth) *obs_depth = depth[0];
    const auto below = std::count_if(depth.begin() + 1, depth.end(), [&](double d) { return d <= depth[0]; });
    return static_cast<double>(below) / static_cast<double>(n_check);
}

namespace {

/// Sample of `k` distinct values from `candidates`, in draw order.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> candidates, std::size_t k, Rng& rng) {
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, candidates.size() - 1);
        std::swap(candidates[i], candidates[pick(rng)]);
    }
    candidates.resize(k);
    return candidates;
}

ObservedStats row_as_obs(const SimulationTable& table, const StatMatch& match, std::size_t row) {
    ObservedStats out;
    out.names = match.names;
    for (auto c : match.columns) out.values.push_back(table.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)));
    return out;
}

ValidationRow validate_one(const SimulationTable& table, const StatMatch& match, std::size_t row,
                           const ValidationOptions& options) {
    ValidationRow out;
    out.row = row;
    for (auto c : table.param_columns) out.truth.push_back(table.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)));
    try {
        RetainOptions retain_options = options.retain;
        retain_options.exclude = row;
        retain_options.standardizer = nullptr;
        const RetainedSet retained = retain(table, row_as_obs(table, match, row), retain_options);
        const GlmFit fit = glm_fit(retained);
        const GlmPosterior posterior(fit, retained.obs, options.glm.dirac_peak_width);
        const auto grids = glm_marginals(fit, posterior, retained, options.glm.density_points);
        for (std::size_t j = 0; j < grids.size(); ++j) {
            const auto pj = static_cast<Eigen::Index>(j);
            const auto c = characterize(grids[j]);
            out.mode.push_back(c.mode);
            out.mean.push_back(c.mean);
            out.median.push_back(c.median);
            // Exact mixture CDF, truncated to the evaluation range of the grid.
            const double lo = fit.scaling.to_unit(pj, grids[j].x.front());
            const double hi = fit.scaling.to_unit(pj, grids[j].x.back());
            const double t = std::clamp(fit.scaling.to_unit(pj, out.truth[j]), lo, hi);
            const double f_lo = posterior.marginal_cdf_unit(pj, lo);
            const double mass = posterior.marginal_cdf_unit(pj, hi) - f_lo;
            out.quantile.push_back(mass > 0.0 ? std::clamp((posterior.marginal_cdf_unit(pj, t) - f_lo) / mass, 0.0, 1.0)
                                              : cdf_at(grids[j], out.truth[j]));
            out.hdi.push_back(hdi_level_of(grids[j], out.truth[j]));
        }
    } catch (const Error& e) {
        out.ok = false;
        out.error = e.what();
        const std::size_t p = out.truth.size();
        const double na = std::numeric_limits<double>::quiet_NaN();
        out.mode.assign(p, na);
        out.mean.assign(p, na);
        out.median.assign(p, na);
        out.quantile.assign(p, na);
        out.hdi.assign(p, na);
    }
    return out;
}

}  // namespace

std::vector<ValidationRow> cross_validate(const SimulationTable& table, const ObservedStats& obs,
                                          const ValidationOptions& options) {
    const StatMatch match = match_stats(table, obs);
    std::vector<std::size_t> candidates;
    if (options.mode == ValidationMode::random) {
        candidates.resize(table.rows());
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    } else {
        RetainOptions retain_options = options.retain;
        retain_options.exclude.reset();
        candidates = retain(table, match, retain_options).indices;
    }
    if (options.n_val == 0) throw ConfigError("number of validation pseudo-observations must be positive");
    if (options.n_val > candidates.size() || options.n_val >= table.rows()) {
        throw ConfigError("cannot draw " + std::to_string(options.n_val) + " pseudo-observations from " +
                          std::to_string(candidates.size()) + " candidate simulations");
    }
    Rng rng = make_stream(options.seed, 0);
    const auto rows = draw_without_replacement(std::move(candidates), options.n_val, rng);
    std::vector<ValidationRow> out(rows.size());
    parallel_for(rows.size(), options.threads, [&](std::size_t i) { out[i] = validate_one(table, match, rows[i], options); });
    const auto failed = std::count_if(out.begin(), out.end(), [](const ValidationRow& r) { return !r.ok; });
    if (failed > 0) log::warn(std::to_string(failed) + " validation replicate(s) failed; reported as NA");
    return out;
}

std::vector<std::string> validation_header(const std::vector<std::string>& param_names) {
    std::vector<std::string> header;
    for (const auto& p : param_names) header.push_back(p);
    for (const auto& p : param_names) {
        for (const char* suffix : {"_mode", "_mean", "_median", "_quantile", "_HDI"}) header.push_back(p + suffix);
    }
    return header;
}

Eigen::MatrixXd validation_matrix(const std::vector<ValidationRow>& rows) {
    if (rows.empty()) return {};
    const auto p = static_cast<Eigen::Index>(rows[0].truth.size());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), p * 6);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(r);
        const auto& row = rows[r];
        for (Eigen::Index j = 0; j < p; ++j) {
            const auto k = static_cast<std::size_t>(j);
            out(i, j) = row.truth[k];
            const Eigen::Index base = p + 5 * j;
            out(i, base) = row.mode[k];
            out(i, base + 1) = row.mean[k];
            out(i, base + 2) = row.median[k];
            out(i, base + 3) = row.quantile[k];
            out(i, base + 4) = row.hdi[k];
        }
    }
    return out;
}

std::vector<Coverage> coverage_tests(const std::vector<ValidationRow>& rows, const std::vector<std::string>& param_names) {
    std::vector<Coverage> out;
    for (std::size_t j = 0; j < param_names.size(); ++j) {
        std::vector<double> q, h;
        for (const auto& r : rows) {
            if (!r.ok) continue;
            q.push_back(r.quantile[j]);
            h.push_back(r.hdi[j]);
        }
        if (q.size() < 20) throw ConfigError("coverage tests need at least 20 successful validation replicates");
        out.push_back({param_names[j], stats::ks_uniform(q), stats::ks_uniform(h)});
    }
    return out;
}

ConfusionMatrix confusion_matrix(const std::vector<ModelChoiceValidationRow>& rows, std::size_t models) {
    ConfusionMatrix out;
    const auto k = static_cast<Eigen::Index>(models);
    out.counts = Eigen::MatrixXd::Zero(k, k);
    for (const auto& r : rows) {
        if (r.ok) out.counts(static_cast<Eigen::Index>(r.true_model), static_cast<Eigen::Index>(r.chosen)) += 1.0;
    }
    const double total = out.counts.sum();
    for (Eigen::Index m = 0; m < k; ++m) {
        const double n = out.counts.row(m).sum();
        out.accuracy.push_back(n > 0.0 ? out.counts(m, m) / n : std::numeric_limits<double>::quiet_NaN());
    }
    out.overall = total > 0.0 ? out.counts.trace() / total : std::numeric_limits<double>::quiet_NaN();
    return out;
}

ModelChoiceValidation model_choice_validate(const std::vector<const SimulationTable*>& tables,
                                            const std::vector<std::string>& stats,
                                            const ModelChoiceValidationOptions& options) {
    check_same_statistics(tables);
    if (options.n_val == 0) throw ConfigError("number of validation pseudo-observations must be positive");
    std::vector<StatMatch> matches;
    ObservedStats names_only{stats, std::vector<double>(stats.size(), 0.0)};
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t m = 0; m < tables.size(); ++m) {
        matches.push_back(match_stats(*tables[m], names_only));
        if (options.n_val >= tables[m]->rows()) {
            throw ConfigError("model " + std::to_string(m) + " has too few simulations for " +
                              std::to_string(options.n_val) + " pseudo-observations");
        }
        std::vector<std::size_t> all(tables[m]->rows());
        std::iota(all.begin(), all.end(), std::size_t{0});
        Rng rng = make_stream(options.seed, m);
        for (auto r : draw_without_replacement(std::move(all), options.n_val, rng)) jobs.emplace_back(m, r);
    }
    ModelChoiceValidation out;
    out.rows.resize(jobs.size());
    parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
        const auto [m, r] = jobs[i];
        auto& row = out.rows[i];
        row.true_model = m;
        row.row = r;
        const ObservedStats obs = row_as_obs(*tables[m], matches[m], r);
        try {
            const ModelChoiceResult result =
                options.method == ChoiceMethod::rejection
                    ? rejection_model_choice(tables, obs, options.tolerance, options.prior, Exclusion{m, r})
                    : glm_model_choice(tables, obs, options.count, options.dirac_peak_width, options.prior, Exclusion{m, r})
                          .result;
            row.probabilities = result.probabilities;
            row.chosen = static_cast<std::size_t>(
                std::max_element(row.probabilities.begin(), row.probabilities.end()) - row.probabilities.begin());
        } catch (const Error&) {
            row.ok = false;
            row.probabilities.assign(tables.size(), std::numeric_limits<double>::quiet_NaN());
        }
    });
    const auto failed = std::count_if(out.rows.begin(), out.rows.end(), [](const auto& r) { return !r.ok; });
    if (failed > 0) log::warn(std::to_string(failed) + " model choice validation replicate(s) failed");
    out.confusion = confusion_matrix(out.rows, tables.size());
    return out;
}

std::vector<CalibrationBin> calibration_curve(const std::vector<ModelChoiceValidationRow>& rows, std::size_t model,
                                              std::size_t bins) {
    std::vector<CalibrationBin> out(bins);
    std::vector<double> sum_p(bins, 0.0), hits(bins, 0.0);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].lower = static_cast<double>(b) / static_cast<double>(bins);
        out[b].upper = static_cast<double>(b + 1) / static_cast<double>(bins);
    }
    for (const auto& r : rows) {
        if (!r.ok) continue;
        const double p = r.probabilities[model];
        const auto b = std::min(bins - 1, static_cast<std::size_t>(std::floor(p * static_cast<double>(bins))));
        ++out[b].count;
        sum_p[b] += p;
        if (r.true_model == model) hits[b] += 1.0;
    }
    for (std::size_t b = 0; b < bins; ++b) {
        const double n = static_cast<double>(out[b].count);
        out[b].mean_p_abc = n > 0 ? sum_p[b] / n : std::numeric_limits<double>::quiet_NaN();
        out[b].p_empirical = n > 0 ? hits[b] / n : std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace abctk
