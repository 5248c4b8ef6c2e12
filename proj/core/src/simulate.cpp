#include "abctk/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

#include "abctk/builtin_models.hpp"
#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/parallel.hpp"
#include "abctk/popgen.hpp"
#include "abctk/process.hpp"
#include "abctk/statselect.hpp"

namespace abctk {

SimOutput FunctionSimulator::simulate(const ParamDraw& params, Rng& rng, std::size_t) {
    auto values = fn_(params, rng);
    if (values.size() != names_.size()) throw SimulatorError("simulator returned the wrong number of statistics");
    return {names_, std::move(values)};
}

std::string format_round_trip(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string render_template(const std::string& text, const ParamDraw& params) {
    auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_ident(text[i])) {
            out += text[i++];
            continue;
        }
        std::size_t j = i;
        while (j < text.size() && is_ident(text[j])) ++j;
        const std::string_view word(text.data() + i, j - i);
        if (const auto v = params.value(word)) out += format_round_trip(*v);
        else out.append(word);
        i = j;
    }
    return out;
}

namespace {

/// Numbers of a rendered argument template, or `fallback` parameters when it is empty.
std::vector<double> builtin_arguments(const std::string& args, const ParamDraw& params,
                                      const std::vector<std::string>& fallback) {
    std::vector<double> out;
    const auto fields = split_fields(render_template(args, params));
    if (fields.empty()) {
        for (const auto& name : fallback) {
            const auto v = params.value(name);
            if (!v) throw SimulatorError("builtin model needs a parameter named '" + name + "'");
            out.push_back(*v);
        }
        return out;
    }
    for (const auto& f : fields) {
        const auto v = parse_double(f);
        if (!v) throw SimulatorError("builtin argument '" + f + "' is not a parameter name or number");
        out.push_back(*v);
    }
    return out;
}

class ToySimulator : public Simulator {
  public:
    ToySimulator(ToyModel model, std::string args) : model_(model), args_(std::move(args)) {}

    SimOutput simulate(const ParamDraw& params, Rng& rng, std::size_t) override {
        std::vector<double> a;
        if (split_fields(args_).empty()) {
            const auto& raw = params.values;
            if (raw.size() < 2) throw SimulatorError("toy models need two parameters (mean, variance)");
            a = {raw[0], raw[1]};
        } else {
            a = builtin_arguments(args_, params, {});
        }
        if (a.size() < 2 || a.size() > 3) throw SimulatorError("toy models take mean, variance and optional sample size");
        ToyParams p{a[0], a[1], a.size() == 3 ? static_cast<std::size_t>(a[2]) : 100};
        return {toy_stat_names(), simulate_toy(model_, p, rng)};
    }

  private:
    ToyModel model_;
    std::string args_;
};

class SfsSimulator : public Simulator {
  public:
    explicit SfsSimulator(std::string args) : args_(std::move(args)) {}

    SimOutput simulate(const ParamDraw& params, Rng& rng, std::size_t) override {
        const auto a = builtin_arguments(args_, params, {"N_CUR", "T1", "OMEGA", "MUTRATE"});
        if (a.size() != 4) throw SimulatorError("sfs-neutral-growth takes N_CUR T1 OMEGA MUTRATE");
        GrowthModel m;
        m.n_cur = a[0];
        m.t1 = a[1];
        m.omega = a[2];
        m.mutation_rate = a[3];
        return {sfs_stat_names(), sfs_stats(simulate_sfs(m, rng)).values()};
    }

  private:
    std::string args_;
};

std::string read_file(const std::filesystem::path& p, const char* what) {
    std::ifstream in(p);
    if (!in) throw SimulatorError(std::string("cannot read ") + what + " '" + p.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class ExternalSimulator : public Simulator {
  public:
    explicit ExternalSimulator(SimulatorBinding binding) : b_(std::move(binding)) {
        program_ = resolve_program(b_.program, b_.base_dir);
        if (!b_.post_program.empty()) post_program_ = resolve_program(b_.post_program, b_.base_dir);
        if (b_.mode == BindingMode::exec_files) {
            const auto path = b_.input_template.is_absolute() ? b_.input_template : b_.base_dir / b_.input_template;
            template_ = read_file(path, "simulation input template");
            const auto name = b_.input_template.filename();
            rendered_name_ = name.stem().string() + "-temp" + name.extension().string();
        }
        if (b_.scratch_dir.empty()) b_.scratch_dir = std::filesystem::temp_directory_path() / "abctk-scratch";
    }

    SimOutput simulate(const ParamDraw& params, Rng&, std::size_t worker) override {
        const auto dir = b_.scratch_dir / ("worker" + std::to_string(worker));
        std::filesystem::create_directories(dir);
        const auto log_file = dir / "simulator.log";
        std::string args = b_.args;
        if (b_.mode == BindingMode::exec_files) {
            std::ofstream(dir / rendered_name_) << render_template(template_, params);
            args = replace_token(args, "SIMINPUTNAME", rendered_name_);
        }
        if (b_.mode == BindingMode::easyabc) {
            std::ofstream input(dir / "input");
            for (double v : params.output_values()) input << format_round_trip(v) << '\n';
        }
        const auto stats_path = dir / (b_.mode == BindingMode::easyabc ? std::string("output") : b_.stats_file);
        std::filesystem::remove(stats_path);

        const auto sim = run_process(program_, split_fields(render_template(args, params)), dir, log_file);
        if (!sim.ok()) throw SimulatorError(failure("simulator", sim, log_file));
        if (!post_program_.empty()) {
            const auto post = run_process(post_program_, split_fields(render_template(b_.post_args, params)), dir, log_file);
            if (!post.ok()) throw SimulatorError(failure("statistics program", post, log_file));
        }
        return b_.mode == BindingMode::easyabc ? read_easyabc(stats_path) : read_stats(stats_path);
    }

  private:
    static std::string replace_token(std::string text, const std::string& token, const std::string& value) {
        for (auto at = text.find(token); at != std::string::npos; at = text.find(token, at + value.size())) {
            text.replace(at, token.size(), value);
        }
        return text;
    }

    static std::string failure(const char* what, const ProcessResult& r, const std::filesystem::path& log) {
        return std::string(what) + (r.signaled ? " was killed" : " exited with status " + std::to_string(r.exit_code)) +
               " (see " + log.string() + ")";
    }

    static SimOutput read_stats(const std::filesystem::path& p) {
        if (!std::filesystem::exists(p)) throw SimulatorError("statistics file '" + p.string() + "' was not written");
        std::ifstream in(p);
        try {
            auto rows = parse_observed(in, p.string());
            return {rows[0].names, rows[0].values};
        } catch (const IoError& e) {
            throw SimulatorError(std::string("malformed statistics file: ") + e.what());
        }
    }

    SimOutput read_easyabc(const std::filesystem::path& p) const {
        if (!std::filesystem::exists(p)) throw SimulatorError("output file '" + p.string() + "' was not written");
        SimOutput out;
        auto text = read_file(p, "simulator output");
        std::replace_if(text.begin(), text.end(), [](char c) { return c == '\n' || c == '\r'; }, ' ');
        for (const auto& f : split_fields(text)) {
            const auto v = parse_double(f);
            if (!v) throw SimulatorError("simulator output contains '" + f + "'");
            out.values.push_back(*v);
        }
        if (!b_.stat_names.empty()) {
            if (b_.stat_names.size() != out.values.size()) {
                throw SimulatorError("simulator output has " + std::to_string(out.values.size()) + " values, expected " +
                                     std::to_string(b_.stat_names.size()));
            }
            out.names = b_.stat_names;
        } else {
            for (std::size_t i = 1; i <= out.values.size(); ++i) out.names.push_back("stat_" + std::to_string(i));
        }
        return out;
    }

    SimulatorBinding b_;
    std::filesystem::path program_;
    std::filesystem::path post_program_;
    std::string template_;
    std::string rendered_name_;
};

}  // namespace

std::unique_ptr<Simulator> make_builtin_simulator(const std::string& name, const std::string& args) {
    if (name == "toy-normal") return std::make_unique<ToySimulator>(ToyModel::normal, args);
    if (name == "toy-uniform") return std::make_unique<ToySimulator>(ToyModel::uniform, args);
    if (name == "sfs-neutral-growth") return std::make_unique<SfsSimulator>(args);
    throw ConfigError("unknown builtin simulator '" + name + "' (toy-normal, toy-uniform, sfs-neutral-growth)");
}

std::unique_ptr<Simulator> make_simulator(const SimulatorBinding& binding) {
    if (binding.mode == BindingMode::builtin) return make_builtin_simulator(binding.program, binding.args);
    return std::make_unique<ExternalSimulator>(binding);
}

std::optional<SimOutput> simulate_with_retry(Simulator& simulator, const ParamDraw& params, Rng& rng,
                                             std::size_t worker) {
    for (int attempt = 0; attempt < 2; ++attempt) {
        try {
            return simulator.simulate(params, rng, worker);
        } catch (const SimulatorError& e) {
            log::warn(std::string(attempt == 0 ? "simulation failed, retrying: " : "simulation failed twice, skipped: ") +
                      e.what());
        }
    }
    return std::nullopt;
}

SimulationTable run_standard(const PriorSampler& sampler, Simulator& simulator, const StandardRunOptions& options,
                             StandardRunReport* report) {
    if (options.n_sims == 0) throw ConfigError("numSims must be positive");
    std::vector<std::optional<ParamDraw>> draws(options.n_sims);
    std::vector<std::optional<SimOutput>> outputs(options.n_sims);

    unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
    if (simulator.max_workers() > 0) threads = std::min<unsigned>(threads, static_cast<unsigned>(simulator.max_workers()));
    std::mutex slots_mutex;
    std::vector<bool> busy(threads, false);
    auto acquire = [&] {
        std::lock_guard lock(slots_mutex);
        for (std::size_t w = 0; w < busy.size(); ++w) {
            if (!busy[w]) {
                busy[w] = true;
                return w;
            }
        }
        throw std::logic_error("no free simulation worker");
    };
    parallel_for(options.n_sims, threads, [&](std::size_t i) {
        Rng rng = make_stream(options.seed, i);
        ParamDraw draw = sampler.sample(rng);
        const std::size_t worker = acquire();
        try {
            outputs[i] = simulate_with_retry(simulator, draw, rng, worker);
        } catch (...) {
            std::lock_guard lock(slots_mutex);
            busy[worker] = false;
            throw;
        }
        {
            std::lock_guard lock(slots_mutex);
            busy[worker] = false;
        }
        draws[i] = std::move(draw);
    });

    std::vector<std::string> stat_names;
    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < options.n_sims; ++i) {
        if (!outputs[i]) continue;
        if (stat_names.empty()) stat_names = outputs[i]->names;
        if (outputs[i]->names != stat_names) {
            throw SimulatorError("statistic names changed between simulations (simulation " + std::to_string(i + 1) + ")");
        }
        ok.push_back(i);
    }
    if (report) {
        report->attempted = options.n_sims;
        report->failed = options.n_sims - ok.size();
    }
    if (ok.empty()) throw SimulatorError("every simulation failed");
    if (ok.size() < options.n_sims) {
        log::warn(std::to_string(options.n_sims - ok.size()) + " of " + std::to_string(options.n_sims) +
                  " simulations failed and were skipped");
    }

    SimulationTable table;
    table.column_names = draws[ok[0]]->output_names();
    const std::size_t p = table.column_names.size();
    for (std::size_t j = 0; j < p; ++j) table.param_columns.push_back(j);
    table.column_names.insert(table.column_names.end(), stat_names.begin(), stat_names.end());
    table.values.resize(static_cast<Eigen::Index>(ok.size()), static_cast<Eigen::Index>(table.column_names.size()));
    for (std::size_t r = 0; r < ok.size(); ++r) {
        const auto params = draws[ok[r]]->output_values();
        const auto& stats = outputs[ok[r]]->values;
        const auto row = static_cast<Eigen::Index>(r);
        for (std::size_t j = 0; j < p; ++j) table.values(row, static_cast<Eigen::Index>(j)) = params[j];
        for (std::size_t j = 0; j < stats.size(); ++j) table.values(row, static_cast<Eigen::Index>(p + j)) = stats[j];
    }
    return options.boosting ? boost(table) : table;
}

}  // namespace abctk
