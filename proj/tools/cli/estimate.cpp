#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "abctk/error.hpp"
#include "abctk/glm.hpp"
#include "abctk/grid.hpp"
#include "abctk/log.hpp"
#include "abctk/model_choice.hpp"
#include "abctk/random.hpp"
#include "abctk/rejection.hpp"
#include "abctk/stats.hpp"
#include "abctk/table_io.hpp"
#include "abctk/validation.hpp"
#include "common.hpp"
#include "tasks.hpp"

namespace abctk::cli {

namespace {

struct EstimateSettings {
    std::string prefix;
    std::size_t num_retained = 0;
    bool standardize = true;
    bool write_retained = false;
    bool plot = false;
    GlmSettings glm;
    std::vector<std::string> joint;
    std::size_t obs_pvalue = 0;
    std::size_t tukey_pvalue = 0;
    std::size_t tukey_projections = 1000;
    std::size_t random_validation = 0;
    std::size_t retained_validation = 0;
    std::size_t model_choice_validation = 0;
    ChoiceMethod method = ChoiceMethod::glm;
    std::optional<double> tolerance;
};

EstimateSettings read_settings(const Config& c) {
    EstimateSettings s;
    s.prefix = c.get("outputPrefix", "ABC_GLM");
    s.num_retained = c.count("numRetained").value_or(0);
    if (s.num_retained == 0) throw ConfigError("numRetained must be a positive count");
    s.standardize = c.flag("standardizeStats", true);
    s.write_retained = c.flag("writeRetained");
    s.plot = c.flag("plotData");
    s.glm.dirac_peak_width = c.number("diracPeakWidth", 0.1);
    if (!(s.glm.dirac_peak_width > 0)) throw ConfigError("diracPeakWidth must be positive");
    s.glm.density_points = c.count("posteriorDensityPoints", 100);
    s.glm.joint_points = c.count("jointPosteriorDensityPoints", 100);
    if (s.glm.density_points < 2 || s.glm.joint_points < 2) throw ConfigError("density point counts must be at least 2");
    if (const auto j = c.find("jointPosteriors"); j && !j->empty()) s.joint = split_list(*j, ',');
    s.obs_pvalue = c.count("obsPValue", 0);
    s.tukey_pvalue = c.count("tukeyPValue", 0);
    s.tukey_projections = c.count("tukeyProjections", 1000);
    s.random_validation = c.count("randomValidation", 0);
    s.retained_validation = c.count("retainedValidation", 0);
    s.model_choice_validation = c.count("modelChoiceValidation", 0);
    s.method = choice_method(c);
    s.tolerance = c.number("tolerance");
    return s;
}

RetainOptions retain_options(const EstimateSettings& s) {
    RetainOptions r;
    r.count = s.num_retained;
    r.standardize = s.standardize;
    return r;
}

std::filesystem::path plot_path(const OutputName& name) {
    auto file = name.filename();
    return file.substr(0, file.size() - 4) + ".dat";
}

void write_marginals(const EstimateSettings& s, const OutputName& base, const RetainedSet& retained,
                     const std::vector<Grid1D>& grids) {
    const auto p = retained.param_names.size();
    std::vector<std::string> header;
    for (const auto& name : retained.param_names) {
        header.push_back(name);
        header.push_back(name + ".density");
    }
    Eigen::MatrixXd payload(static_cast<Eigen::Index>(s.glm.density_points), static_cast<Eigen::Index>(2 * p));
    for (std::size_t j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < grids[j].size(); ++i) {
            payload(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * j)) = grids[j].x[i];
            payload(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * j + 1)) = grids[j].density[i];
        }
    }
    OutputName name = base;
    name.tag = OutputTag::MarginalPosteriorDensities;
    write_tagged(".", name, header, payload);

    std::vector<std::string> char_header{"parameter"};
    for (auto n : characteristic_names()) char_header.emplace_back(n);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < p; ++j) {
        std::vector<std::string> row{retained.param_names[j]};
        for (double v : characteristic_values(characterize(grids[j]))) row.push_back(format_number(v));
        rows.push_back(std::move(row));
    }
    name.tag = OutputTag::MarginalPosteriorCharacteristics;
    write_tagged_text(".", name, char_header, rows);

    if (s.plot) {
        name.tag = OutputTag::MarginalPosteriorDensities;
        std::ofstream out(plot_path(name));
        for (std::size_t j = 0; j < p; ++j) {
            out << "# " << retained.param_names[j] << " density HDI\n";
            for (std::size_t i = 0; i < grids[j].size(); ++i) {
                out << format_number(grids[j].x[i]) << ' ' << format_number(grids[j].density[i]) << ' '
                    << format_number(hdi_level_of(grids[j], grids[j].x[i])) << '\n';
            }
            out << "\n\n";
        }
    }
}

void write_joint(const EstimateSettings& s, const OutputName& base, const GlmFit& fit, const GlmPosterior& posterior,
                 const RetainedSet& retained) {
    std::vector<Eigen::Index> which;
    std::string suffix;
    for (const auto& n : s.joint) {
        const auto it = std::find(retained.param_names.begin(), retained.param_names.end(), n);
        if (it == retained.param_names.end()) throw ConfigError("jointPosteriors names unknown parameter '" + n + "'");
        const auto j = it - retained.param_names.begin();
        which.push_back(j);
        suffix += (suffix.empty() ? "" : "_") + std::to_string(j + 1);
    }
    const auto joint = glm_joint(fit, posterior, retained, which, s.glm.joint_points);
    const auto d = which.size();
    std::vector<std::string> header;
    for (auto j : which) header.push_back(retained.param_names[static_cast<std::size_t>(j)]);
    header.push_back("density");
    header.push_back("HDI");
    Eigen::MatrixXd payload(static_cast<Eigen::Index>(joint.density.size()), static_cast<Eigen::Index>(d + 2));
    for (std::size_t cell = 0; cell < joint.density.size(); ++cell) {
        std::size_t rest = cell;
        const auto r = static_cast<Eigen::Index>(cell);
        for (std::size_t k = 0; k < d; ++k) {
            const auto& axis = joint.axes[k];
            payload(r, static_cast<Eigen::Index>(k)) = axis[rest % axis.size()];
            rest /= axis.size();
        }
        payload(r, static_cast<Eigen::Index>(d)) = joint.density[cell];
        payload(r, static_cast<Eigen::Index>(d + 1)) = joint.hdi[cell];
    }
    OutputName name = base;
    name.tag = OutputTag::jointPosterior;
    name.suffix = suffix;
    write_tagged(".", name, header, payload);

    if (s.plot && d == 2) {
        std::ofstream out(plot_path(name));
        out << "# " << header[0] << ' ' << header[1] << " density HDI\n";
        const auto nx = joint.axes[0].size();
        for (std::size_t cell = 0; cell < joint.density.size(); ++cell) {
            const auto r = static_cast<Eigen::Index>(cell);
            if (cell > 0 && cell % nx == 0) out << '\n';
            out << format_number(payload(r, 0)) << ' ' << format_number(payload(r, 1)) << ' '
                << format_number(payload(r, 2)) << ' ' << format_number(payload(r, 3)) << '\n';
        }
    }
}

/// Marginal-density and Tukey P-values of one model for one observation.
FitPValues fit_pvalues(const EstimateSettings& s, const SimulationTable& table, const ObservedStats& obs,
                       const RetainedSet& retained, const GlmFit& fit, std::uint64_t seed) {
    FitPValues out;
    const std::size_t need = std::max(s.obs_pvalue, s.tukey_pvalue);
    out.n_check = need;
    if (need == 0) return out;
    std::optional<RetainedSet> wider;
    std::optional<GlmFit> wider_fit;
    const RetainedSet* set = &retained;
    const GlmFit* f = &fit;
    if (need > retained.size()) {
        RetainOptions r = retain_options(s);
        r.count = need;
        wider = retain(table, obs, r);
        set = &*wider;
        if (s.obs_pvalue > retained.size()) {
            wider_fit = glm_fit(*wider);
            f = &*wider_fit;
        }
    }
    if (s.obs_pvalue > 0) {
        double density = 0.0;
        out.marginal_density_pvalue = marginal_density_pvalue(*f, *set, set->obs, s.obs_pvalue, s.glm.dirac_peak_width, &density);
        out.marginal_density = density;
    }
    if (s.tukey_pvalue > 0) {
        Rng rng = make_stream(seed, 0);
        const Eigen::MatrixXd cloud = set->stats.topRows(static_cast<Eigen::Index>(s.tukey_pvalue));
        double depth = 0.0;
        out.tukey_pvalue = tukey_pvalue(cloud, set->obs, s.tukey_pvalue, s.tukey_projections, rng, &depth);
        out.tukey_depth = depth;
    }
    return out;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

void log_coverage(const std::vector<ValidationRow>& rows, const std::vector<std::string>& names, const std::string& what) {
    if (rows.size() < 20) return;
    for (const auto& c : coverage_tests(rows, names)) {
        log::info(what + " " + c.param + ": KS uniformity of posterior quantiles p = " + format_number(c.quantile.p_value) +
                  ", of HDI levels p = " + format_number(c.hdi.p_value));
    }
}

void write_validation(const EstimateSettings& s, const OutputName& name, const std::vector<ValidationRow>& rows,
                      const std::vector<std::string>& params) {
    write_tagged(".", name, validation_header(params), validation_matrix(rows));
    log_coverage(rows, params, std::string(tag_name(name.tag)));
    (void)s;
}

/// One row per model: model choice columns when several models compete, P-value columns
/// when obsPValue or tukeyPValue is set.
void write_model_fit(const EstimateSettings& s, const Inputs& in, std::size_t o, const ModelChoiceResult* result,
                     const std::vector<double>& marginal, const std::vector<FitPValues>& pvalues) {
    const bool want_fit = s.obs_pvalue > 0 || s.tukey_pvalue > 0;
    std::vector<std::string> header{"model", "simName"};
    if (result) {
        for (const char* h : {"marginal_density", "evidence", "posterior_probability", "bayes_factor_vs_model0"}) header.emplace_back(h);
    }
    if (want_fit) {
        for (const char* h : {"obs_marginal_density", "marginal_density_pvalue", "tukey_depth", "tukey_pvalue"}) header.emplace_back(h);
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t m = 0; m < in.tables.size(); ++m) {
        std::vector<std::string> row{std::to_string(m), in.sim_names[m]};
        if (result) {
            row.push_back(format_number(marginal[m]));
            row.push_back(format_number(result->evidence[m]));
            row.push_back(format_number(result->probabilities[m]));
            row.push_back(format_number(std::exp(result->log_evidence[m] - result->log_evidence[0])));
        }
        if (want_fit) {
            const auto& p = pvalues[m];
            row.push_back(opt_number(p.marginal_density));
            row.push_back(opt_number(p.marginal_density_pvalue));
            row.push_back(opt_number(p.tukey_depth));
            row.push_back(opt_number(p.tukey_pvalue));
        }
        rows.push_back(std::move(row));
    }
    write_tagged_text(".", OutputName{s.prefix, std::nullopt, OutputTag::modelFit, "", static_cast<int>(o)}, header, rows);
}

void model_choice_outputs(RunContext& ctx, const EstimateSettings& s, const Inputs& in,
                          const std::vector<std::vector<FitPValues>>& pvalues) {
    const auto tables = in.pointers();
    for (std::size_t o = 0; o < in.obs.size(); ++o) {
        ModelChoiceResult result;
        std::vector<double> marginal(in.tables.size(), std::nan(""));
        if (s.method == ChoiceMethod::glm) {
            const auto choice = glm_model_choice(tables, in.obs[o], s.num_retained, s.glm.dirac_peak_width);
            result = choice.result;
            for (std::size_t m = 0; m < marginal.size(); ++m) {
                marginal[m] = std::exp(glm_log_marginal_density(choice.fits[m], choice.retained[m].obs, s.glm.dirac_peak_width));
            }
        } else {
            result = rejection_model_choice(tables, in.obs[o], rejection_tolerance(s.tolerance, s.num_retained, in));
        }
        for (std::size_t m = 0; m < in.tables.size(); ++m) {
            log::info("Obs" + std::to_string(o) + " model " + std::to_string(m) + ": P = " +
                      format_number(result.probabilities[m]));
        }
        write_model_fit(s, in, o, &result, marginal, pvalues[o]);
    }

    if (s.model_choice_validation > 0) {
        ModelChoiceValidationOptions v;
        v.method = s.method;
        v.tolerance = rejection_tolerance(s.tolerance, s.num_retained, in);
        v.count = s.num_retained;
        v.dirac_peak_width = s.glm.dirac_peak_width;
        v.n_val = s.model_choice_validation;
        v.seed = sub_seed(ctx.seed, 3);
        v.threads = ctx.threads;
        const auto validation = model_choice_validate(tables, in.stat_names, v);
        const auto models = in.tables.size();

        std::vector<std::string> header{"true_model", "row"};
        for (std::size_t m = 0; m < models; ++m) header.push_back("P_model" + std::to_string(m));
        header.push_back("chosen_model");
        Eigen::MatrixXd raw(static_cast<Eigen::Index>(validation.rows.size()), static_cast<Eigen::Index>(models + 3));
        for (std::size_t r = 0; r < validation.rows.size(); ++r) {
            const auto& row = validation.rows[r];
            const auto i = static_cast<Eigen::Index>(r);
            raw(i, 0) = static_cast<double>(row.true_model);
            raw(i, 1) = static_cast<double>(row.row);
            for (std::size_t m = 0; m < models; ++m) {
                raw(i, static_cast<Eigen::Index>(m + 2)) = row.ok ? row.probabilities[m] : std::nan("");
            }
            raw(i, static_cast<Eigen::Index>(models + 2)) = row.ok ? static_cast<double>(row.chosen) : std::nan("");
        }
        write_tagged(".", OutputName{s.prefix, std::nullopt, OutputTag::modelChoiceValidation, "", std::nullopt}, header, raw);

        std::vector<std::string> cm_header{"true_model"};
        for (std::size_t m = 0; m < models; ++m) cm_header.push_back("count_model" + std::to_string(m));
        for (std::size_t m = 0; m < models; ++m) cm_header.push_back("fraction_model" + std::to_string(m));
        Eigen::MatrixXd cm(static_cast<Eigen::Index>(models), static_cast<Eigen::Index>(2 * models + 1));
        const auto& counts = validation.confusion.counts;
        for (std::size_t t = 0; t < models; ++t) {
            const auto ti = static_cast<Eigen::Index>(t);
            const double total = counts.row(ti).sum();
            cm(ti, 0) = static_cast<double>(t);
            for (std::size_t m = 0; m < models; ++m) {
                const auto mi = static_cast<Eigen::Index>(m);
                cm(ti, mi + 1) = counts(ti, mi);
                cm(ti, static_cast<Eigen::Index>(models) + mi + 1) = total > 0 ? counts(ti, mi) / total : std::nan("");
            }
            log::info("model choice validation, model " + std::to_string(t) + ": accuracy " +
                      format_number(validation.confusion.accuracy[t]));
        }
        write_tagged(".", OutputName{s.prefix, std::nullopt, OutputTag::confusionMatrix, "", std::nullopt}, cm_header, cm);

        for (std::size_t m = 0; m < models; ++m) {
            const auto bins = calibration_curve(validation.rows, m);
            std::ostringstream line;
            for (const auto& b : bins) {
                if (b.count) line << " [" << format_number(b.lower) << "," << format_number(b.upper) << "): "
                                  << format_number(b.p_empirical);
            }
            log::info("calibration of model " + std::to_string(m) + " (bin: empirical probability)" + line.str());
            if (s.plot) {
                std::ofstream out(s.prefix + "_model" + std::to_string(m) + "_calibration.dat");
                out << "# lower upper count p_ABC p_empirical\n";
                for (const auto& b : bins) {
                    out << format_number(b.lower) << ' ' << format_number(b.upper) << ' ' << b.count << ' '
                        << format_number(b.mean_p_abc) << ' ' << format_number(b.p_empirical) << '\n';
                }
            }
        }
    }
}

}  // namespace

void run_estimate(RunContext& ctx) {
    auto& c = ctx.config;
    const auto s = read_settings(c);
    const Inputs in = load_inputs(c);
    const auto retain_opts = retain_options(s);
    const bool multi = in.tables.size() > 1;
    const bool want_fit = s.obs_pvalue > 0 || s.tukey_pvalue > 0;

    std::vector<std::vector<FitPValues>> pvalues(in.obs.size(), std::vector<FitPValues>(in.tables.size()));
    for (std::size_t m = 0; m < in.tables.size(); ++m) {
        const auto& table = in.tables[m];
        for (std::size_t o = 0; o < in.obs.size(); ++o) {
            const OutputName base{s.prefix, static_cast<int>(m), OutputTag::BestSimsParamStats, "", static_cast<int>(o)};
            const auto retained = retain(table, in.obs[o], retain_opts);
            log::info("model " + std::to_string(m) + ", Obs" + std::to_string(o) + ": retained " +
                      std::to_string(retained.size()) + " of " + std::to_string(retained.total_rows) +
                      " simulations, epsilon " + format_number(retained.epsilon));
            if (s.write_retained) write_tagged(".", base, retained_rows(table, retained));

            const auto fit = glm_fit(retained);
            const GlmPosterior posterior(fit, retained.obs, s.glm.dirac_peak_width);
            const auto grids = glm_marginals(fit, posterior, retained, s.glm.density_points);
            write_marginals(s, base, retained, grids);
            if (!s.joint.empty()) write_joint(s, base, fit, posterior, retained);
            if (want_fit) pvalues[o][m] = fit_pvalues(s, table, in.obs[o], retained, fit, sub_seed(ctx.seed, 100 + m));

            if (s.retained_validation > 0) {
                ValidationOptions v{ValidationMode::retained, s.retained_validation, retain_opts, s.glm,
                                    sub_seed(ctx.seed, 1000 + 100 * m + o), ctx.threads};
                OutputName name{s.prefix, static_cast<int>(m), OutputTag::RetainedValidation, "", static_cast<int>(o)};
                write_validation(s, name, cross_validate(table, in.obs[o], v), retained.param_names);
            }
        }
        if (s.random_validation > 0) {
            ValidationOptions v{ValidationMode::random, s.random_validation, retain_opts, s.glm, sub_seed(ctx.seed, 200 + m),
                                ctx.threads};
            OutputName name{s.prefix, static_cast<int>(m), OutputTag::RandomValidation, "", std::nullopt};
            write_validation(s, name, cross_validate(table, in.obs[0], v), table.param_names());
        }
    }

    if (want_fit) {
        for (std::size_t o = 0; o < in.obs.size(); ++o) {
            for (std::size_t m = 0; m < in.tables.size(); ++m) {
                const auto& p = pvalues[o][m];
                log::info("Obs" + std::to_string(o) + " model " + std::to_string(m) + ": marginal density P-value " +
                          opt_number(p.marginal_density_pvalue) + ", Tukey P-value " + opt_number(p.tukey_pvalue));
            }
        }
    }
    if (multi) {
        model_choice_outputs(ctx, s, in, pvalues);
    } else {
        if (want_fit) {
            for (std::size_t o = 0; o < in.obs.size(); ++o) write_model_fit(s, in, o, nullptr, {}, pvalues[o]);
        }
        if (s.model_choice_validation > 0) log::warn("modelChoiceValidation needs at least two models; ignored");
    }
}

}  // namespace abctk::cli
