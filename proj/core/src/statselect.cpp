#include "abctk/statselect.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "abctk/error.hpp"
#include "abctk/random.hpp"
#include "abctk/stats.hpp"

namespace abctk {

std::vector<std::string> boosted_names(const std::vector<std::string>& names) {
    std::vector<std::string> out = names;
    for (std::size_t a = 0; a < names.size(); ++a) {
        for (std::size_t b = a; b < names.size(); ++b) out.push_back(names[a] + "_X_" + names[b]);
    }
    return out;
}

SimulationTable boost(const SimulationTable& table) {
    const auto stat_cols = table.stat_columns();
    const std::size_t s = stat_cols.size();
    if (s == 0) throw ConfigError("boosting needs at least one statistic");
    SimulationTable out = table;
    const auto extra = static_cast<Eigen::Index>(s * (s + 1) / 2);
    out.values.conservativeResize(Eigen::NoChange, table.values.cols() + extra);
    Eigen::Index col = table.values.cols();
    for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = a; b < s; ++b) {
            out.values.col(col++) = table.values.col(static_cast<Eigen::Index>(stat_cols[a]))
                                        .cwiseProduct(table.values.col(static_cast<Eigen::Index>(stat_cols[b])));
            out.column_names.push_back(table.column_names[stat_cols[a]] + "_X_" + table.column_names[stat_cols[b]]);
        }
    }
    return out;
}

ObservedStats boost(const ObservedStats& obs) {
    ObservedStats out;
    out.names = boosted_names(obs.names);
    out.values = obs.values;
    for (std::size_t a = 0; a < obs.values.size(); ++a) {
        for (std::size_t b = a; b < obs.values.size(); ++b) out.values.push_back(obs.values[a] * obs.values[b]);
    }
    return out;
}

double BoxCoxSpec::box_cox(double x) const {
    const double shifted = 1.0 + (x - min) / (max - min);
    if (!(shifted > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (lambda == 0.0) return gm * std::log(shifted);
    return (std::pow(shifted, lambda) - 1.0) / (lambda * std::pow(gm, lambda - 1.0));
}

double BoxCoxSpec::standardize(double x, bool do_box_cox) const {
    return ((do_box_cox ? box_cox(x) : x) - mean) / sd;
}

LinearCombDef parse_linear_comb(std::istream& in, const std::string& source) {
    LinearCombDef def;
    std::vector<std::vector<double>> loadings;
    std::string line;
    int line_no = 0;
    std::size_t width = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() < 8) {
            throw ConfigError(source + ":" + std::to_string(line_no) +
                              ": expected a name, six Box-Cox values and at least one loading");
        }
        std::vector<double> numbers;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            const auto v = parse_double(fields[i]);
            if (!v || !std::isfinite(*v)) {
                throw ConfigError(source + ":" + std::to_string(line_no) + ": '" + fields[i] + "' is not a number");
            }
            numbers.push_back(*v);
        }
        if (width == 0) width = numbers.size();
        if (numbers.size() != width) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": rows disagree on the number of components");
        }
        if (!seen.insert(fields[0]).second) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate statistic '" + fields[0] + "'");
        }
        BoxCoxSpec spec{numbers[0], numbers[1], numbers[2], numbers[3], numbers[4], numbers[5]};
        if (!(spec.max > spec.min) || !(spec.sd > 0.0) || !(spec.gm > 0.0)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": invalid Box-Cox definition for '" +
                              fields[0] + "'");
        }
        def.names.push_back(fields[0]);
        def.box_cox.push_back(spec);
        loadings.emplace_back(numbers.begin() + 6, numbers.end());
    }
    if (def.names.empty()) throw ConfigError(source + ": no linear combination defined");
    def.loadings.resize(static_cast<Eigen::Index>(loadings.size()), static_cast<Eigen::Index>(width - 6));
    for (std::size_t i = 0; i < loadings.size(); ++i) {
        for (std::size_t j = 0; j < loadings[i].size(); ++j) {
            def.loadings(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = loadings[i][j];
        }
    }
    return def;
}

LinearCombDef read_linear_comb(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open linear combination file '" + path.string() + "'");
    return parse_linear_comb(in, path.string());
}

void write_linear_comb(std::ostream& out, const LinearCombDef& def) {
    for (std::size_t i = 0; i < def.names.size(); ++i) {
        const auto& b = def.box_cox[i];
        out << def.names[i];
        for (double v : {b.max, b.min, b.lambda, b.gm, b.mean, b.sd}) out << ' ' << format_number(v);
        for (Eigen::Index j = 0; j < def.loadings.cols(); ++j) {
            out << ' ' << format_number(def.loadings(static_cast<Eigen::Index>(i), j));
        }
        out << '\n';
    }
}

std::vector<std::string> linear_comb_names(std::size_t k) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= k; ++i) out.push_back("LinearCombination_" + std::to_string(i));
    return out;
}

Eigen::MatrixXd linear_comb_scores(const Eigen::MatrixXd& stats, const LinearCombDef& def, std::size_t k,
                                   bool do_box_cox, const std::string& source) {
    if (k == 0 || k > def.components()) {
        throw ConfigError("requested " + std::to_string(k) + " linear combinations but the definition has " +
                          std::to_string(def.components()));
    }
    Eigen::MatrixXd z(stats.rows(), stats.cols());
    for (Eigen::Index i = 0; i < stats.rows(); ++i) {
        for (Eigen::Index j = 0; j < stats.cols(); ++j) {
            const double v = def.box_cox[static_cast<std::size_t>(j)].standardize(stats(i, j), do_box_cox);
            if (!std::isfinite(v)) {
                throw NumericalError(source + ": value " + format_number(stats(i, j)) + " of statistic '" +
                                     def.names[static_cast<std::size_t>(j)] + "' in row " + std::to_string(i + 1) +
                                     " lies outside the Box-Cox domain");
            }
            z(i, j) = v;
        }
    }
    return z * def.loadings.leftCols(static_cast<Eigen::Index>(k));
}

SimulationTable transform(const SimulationTable& table, const LinearCombDef& def, std::size_t k, bool do_box_cox) {
    std::vector<std::size_t> def_cols;
    for (const auto& name : def.names) {
        const auto c = table.column_index(name);
        if (!c) throw ConfigError("statistic '" + name + "' of the linear combination is missing from the input");
        def_cols.push_back(*c);
    }
    std::vector<std::size_t> keep;
    for (std::size_t c = 0; c < table.cols(); ++c) {
        if (std::find(def_cols.begin(), def_cols.end(), c) == def_cols.end()) keep.push_back(c);
    }
    Eigen::MatrixXd stats(table.values.rows(), static_cast<Eigen::Index>(def_cols.size()));
    for (std::size_t j = 0; j < def_cols.size(); ++j) {
        stats.col(static_cast<Eigen::Index>(j)) = table.values.col(static_cast<Eigen::Index>(def_cols[j]));
    }
    const Eigen::MatrixXd scores = linear_comb_scores(stats, def, k, do_box_cox);

    SimulationTable out;
    out.values.resize(table.values.rows(), static_cast<Eigen::Index>(keep.size() + k));
    for (std::size_t j = 0; j < keep.size(); ++j) {
        out.column_names.push_back(table.column_names[keep[j]]);
        out.values.col(static_cast<Eigen::Index>(j)) = table.values.col(static_cast<Eigen::Index>(keep[j]));
    }
    const auto lc = linear_comb_names(k);
    out.column_names.insert(out.column_names.end(), lc.begin(), lc.end());
    out.values.rightCols(static_cast<Eigen::Index>(k)) = scores;
    for (auto p : table.param_columns) {
        for (std::size_t j = 0; j < keep.size(); ++j) {
            if (keep[j] == p) out.param_columns.push_back(j);
        }
    }
    return out;
}

ObservedStats transform(const ObservedStats& obs, const LinearCombDef& def, std::size_t k, bool do_box_cox) {
    Eigen::MatrixXd stats(1, static_cast<Eigen::Index>(def.names.size()));
    std::vector<bool> used(obs.names.size(), false);
    for (std::size_t j = 0; j < def.names.size(); ++j) {
        const auto it = std::find(obs.names.begin(), obs.names.end(), def.names[j]);
        if (it == obs.names.end()) {
            throw ConfigError("statistic '" + def.names[j] + "' of the linear combination is missing from the input");
        }
        const auto i = static_cast<std::size_t>(it - obs.names.begin());
        used[i] = true;
        stats(0, static_cast<Eigen::Index>(j)) = obs.values[i];
    }
    const Eigen::MatrixXd scores = linear_comb_scores(stats, def, k, do_box_cox);
    ObservedStats out;
    for (std::size_t i = 0; i < obs.names.size(); ++i) {
        if (used[i]) continue;
        out.names.push_back(obs.names[i]);
        out.values.push_back(obs.values[i]);
    }
    const auto lc = linear_comb_names(k);
    out.names.insert(out.names.end(), lc.begin(), lc.end());
    for (Eigen::Index j = 0; j < scores.cols(); ++j) out.values.push_back(scores(0, j));
    return out;
}

BoxCoxSpec fit_box_cox(const Eigen::VectorXd& x) {
    BoxCoxSpec spec;
    spec.min = x.minCoeff();
    spec.max = x.maxCoeff();
    if (!(spec.max > spec.min)) throw NumericalError("cannot fit a Box-Cox transformation to a constant statistic");
    const Eigen::ArrayXd shifted = 1.0 + (x.array() - spec.min) / (spec.max - spec.min);
    spec.gm = std::exp(shifted.log().mean());
    double best = -std::numeric_limits<double>::infinity();
    for (int step = -20; step <= 20; ++step) {
        BoxCoxSpec trial = spec;
        trial.lambda = step / 10.0;
        Eigen::ArrayXd bc(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) bc(i) = trial.box_cox(x(i));
        const double var = (bc - bc.mean()).square().mean();
        // The geometric-mean scaling makes the Jacobian term constant, so the profile
        // log-likelihood reduces to the variance of the transformed values.
        const double ll = -0.5 * static_cast<double>(x.size()) * std::log(var);
        if (ll > best) {
            best = ll;
            spec.lambda = trial.lambda;
        }
    }
    if (std::abs(spec.lambda) < 0.05) spec.lambda = 0.0;
    Eigen::VectorXd bc(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) bc(i) = spec.box_cox(x(i));
    spec.mean = bc.mean();
    spec.sd = std::sqrt((bc.array() - spec.mean).square().sum() / static_cast<double>(x.size() - 1));
    if (!(spec.sd > 0.0)) throw NumericalError("statistic is constant after the Box-Cox transformation");
    return spec;
}

PlsModel nipals_pls(const Eigen::MatrixXd& x0, const Eigen::MatrixXd& y0, std::size_t k) {
    const Eigen::Index n = x0.rows();
    const Eigen::Index s = x0.cols();
    const Eigen::Index p = y0.cols();
    const auto kk = static_cast<Eigen::Index>(k);
    if (kk < 1 || kk > std::min(s, n - 1)) throw ConfigError("invalid number of PLS components");
    Eigen::MatrixXd x = x0;
    Eigen::MatrixXd y = y0;
    PlsModel m;
    m.weights.resize(s, kk);
    m.x_loadings.resize(s, kk);
    m.y_loadings.resize(p, kk);
    for (Eigen::Index a = 0; a < kk; ++a) {
        Eigen::Index start = 0;
        (y.colwise().squaredNorm()).maxCoeff(&start);
        Eigen::VectorXd u = y.col(start);
        Eigen::VectorXd w, t, q;
        Eigen::VectorXd t_old = Eigen::VectorXd::Zero(n);
        for (int iter = 0; iter < 10000; ++iter) {
            w = x.transpose() * u;
            const double wn = w.norm();
            if (!(wn > 0.0)) throw NumericalError("PLS weight vector vanished; statistics carry no signal");
            w /= wn;
            t = x * w;
            q = y.transpose() * t / t.squaredNorm();
            u = y * q / q.squaredNorm();
            if ((t - t_old).norm() <= 1e-10 * std::max(1.0, t.norm())) break;
            t_old = t;
        }
        const Eigen::VectorXd pl = x.transpose() * t / t.squaredNorm();
        x -= t * pl.transpose();
        y -= t * q.transpose();
        m.weights.col(a) = w;
        m.x_loadings.col(a) = pl;
        m.y_loadings.col(a) = q;
    }
    m.rotation = m.weights * (m.x_loadings.transpose() * m.weights).inverse();
    for (Eigen::Index a = 0; a < kk; ++a) {
        Eigen::Index at = 0;
        m.rotation.col(a).cwiseAbs().maxCoeff(&at);
        if (m.rotation(at, a) < 0.0) {
            m.rotation.col(a) *= -1.0;
            m.weights.col(a) *= -1.0;
            m.x_loadings.col(a) *= -1.0;
            m.y_loadings.col(a) *= -1.0;
        }
    }
    m.scores = x0 * m.rotation;
    return m;
}

std::size_t recommend_components(const Eigen::MatrixXd& rmsep) {
    const Eigen::RowVectorXd best = rmsep.colwise().minCoeff();
    for (Eigen::Index k = 0; k < rmsep.rows(); ++k) {
        if ((rmsep.row(k).array() <= 1.01 * best.array()).all()) return static_cast<std::size_t>(k + 1);
    }
    return static_cast<std::size_t>(rmsep.rows());
}

namespace {

struct Scaled {
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd sd;
};

Scaled column_scaling(const Eigen::MatrixXd& m) {
    Scaled s;
    s.mean = m.colwise().mean();
    s.sd = ((m.rowwise() - s.mean).array().square().colwise().sum() / static_cast<double>(m.rows() - 1)).sqrt();
    for (Eigen::Index j = 0; j < s.sd.size(); ++j) {
        if (!(s.sd(j) > 0.0)) throw NumericalError("PLS input column " + std::to_string(j + 1) + " is constant");
    }
    return s;
}

Eigen::MatrixXd apply_scaling(const Eigen::MatrixXd& m, const Scaled& s) {
    return ((m.rowwise() - s.mean).array().rowwise() / s.sd.array()).matrix();
}

}  // namespace

PlsResult fit_pls(const SimulationTable& table, const PlsOptions& options) {
    const auto stat_cols = table.stat_columns();
    const Eigen::Index n = table.values.rows();
    const auto s = static_cast<Eigen::Index>(stat_cols.size());
    const auto p = static_cast<Eigen::Index>(table.param_columns.size());
    if (p == 0) throw ConfigError("PLS needs at least one parameter column");
    const auto k_max = static_cast<Eigen::Index>(std::min<std::size_t>(options.max_components, stat_cols.size()));
    if (k_max < 1) throw ConfigError("PLS needs at least one statistic");
    if (n <= k_max + static_cast<Eigen::Index>(options.folds) || options.folds < 2) {
        throw ConfigError("too few simulations for the requested PLS components and folds");
    }

    PlsResult out;
    out.param_names = table.param_names();
    out.def.names = table.stat_names();
    Eigen::MatrixXd z(n, s);
    for (Eigen::Index j = 0; j < s; ++j) {
        const Eigen::VectorXd col = table.values.col(static_cast<Eigen::Index>(stat_cols[static_cast<std::size_t>(j)]));
        BoxCoxSpec spec;
        if (options.box_cox) {
            spec = fit_box_cox(col);
        } else {
            // Identity Box-Cox: min 0, max 1, lambda 1, gm 1 maps x to itself.
            spec.mean = col.mean();
            spec.sd = std::sqrt((col.array() - spec.mean).square().sum() / static_cast<double>(n - 1));
            if (!(spec.sd > 0.0)) throw NumericalError("statistic '" + out.def.names[static_cast<std::size_t>(j)] + "' is constant");
        }
        for (Eigen::Index i = 0; i < n; ++i) z(i, j) = spec.standardize(col(i), options.box_cox);
        out.def.box_cox.push_back(spec);
    }
    Eigen::MatrixXd y(n, p);
    for (Eigen::Index j = 0; j < p; ++j) y.col(j) = table.values.col(static_cast<Eigen::Index>(table.param_columns[static_cast<std::size_t>(j)]));

    const Scaled ys = column_scaling(y);
    const PlsModel model = nipals_pls(z, apply_scaling(y, ys), static_cast<std::size_t>(k_max));
    out.def.loadings = model.rotation;

    // Cross-validated prediction error per component count, on the raw parameter scale.
    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng = make_stream(options.seed, 0);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd sse = Eigen::MatrixXd::Zero(k_max, p);
    for (std::size_t f = 0; f < options.folds; ++f) {
        std::vector<Eigen::Index> train, test;
        for (std::size_t i = 0; i < order.size(); ++i) {
            (i % options.folds == f ? test : train).push_back(static_cast<Eigen::Index>(order[i]));
        }
        const Eigen::MatrixXd ztr = z(train, Eigen::all);
        const Eigen::MatrixXd ytr = y(train, Eigen::all);
        const Scaled xs_tr = column_scaling(ztr);
        const Scaled ys_tr = column_scaling(ytr);
        const PlsModel fold = nipals_pls(apply_scaling(ztr, xs_tr), apply_scaling(ytr, ys_tr), static_cast<std::size_t>(k_max));
        const Eigen::MatrixXd tte = apply_scaling(z(test, Eigen::all), xs_tr) * fold.rotation;
        const Eigen::MatrixXd yte = y(test, Eigen::all);
        for (Eigen::Index k = 1; k <= k_max; ++k) {
            Eigen::MatrixXd pred = tte.leftCols(k) * fold.y_loadings.leftCols(k).transpose();
            pred = (pred.array().rowwise() * ys_tr.sd.array()).rowwise() + ys_tr.mean.array();
            sse.row(k - 1) += (pred - yte).array().square().colwise().sum().matrix();
        }
    }
    out.rmsep = (sse / static_cast<double>(n)).array().sqrt();
    out.recommended = recommend_components(out.rmsep);
    return out;
}

}  // namespace abctk
