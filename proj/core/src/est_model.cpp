#include "abctk/est_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/stats.hpp"
#include "abctk/table_io.hpp"

namespace abctk {

double PriorSpec::density(double x) const {
    switch (kind) {
        case PriorKind::fixed: return 1.0;
        case PriorKind::uniform: return (x >= min && x <= max) ? 1.0 / (max - min) : 0.0;
        case PriorKind::log_uniform:
            return (x >= min && x <= max) ? 1.0 / (x * std::log(max / min)) : 0.0;
        case PriorKind::normal: {
            if (x < min || x > max) return 0.0;
            const double mass = stats::normal_cdf(max, mean, sd) - stats::normal_cdf(min, mean, sd);
            return stats::normal_pdf(x, mean, sd) / mass;
        }
    }
    return 0.0;
}

bool Rule::holds(double a, double b) const {
    switch (op) {
        case RuleOp::less: return a < b;
        case RuleOp::greater: return a > b;
        case RuleOp::less_equal: return a <= b;
        case RuleOp::greater_equal: return a >= b;
    }
    return false;
}

std::string Rule::to_string() const {
    static constexpr const char* ops[] = {"<", ">", "<=", ">="};
    std::string out = lhs + " " + ops[static_cast<int>(op)] + " ";
    if (const auto* name = std::get_if<std::string>(&rhs)) return out + *name;
    return out + format_number(std::get<double>(rhs));
}

std::vector<std::string> EstModel::names() const {
    std::vector<std::string> out;
    for (const auto& p : priors) out.push_back(p.name);
    for (const auto& c : complex) out.push_back(c.name);
    return out;
}

std::optional<std::size_t> EstModel::prior_index(std::string_view name) const {
    for (std::size_t i = 0; i < priors.size(); ++i) {
        if (priors[i].name == name) return i;
    }
    return std::nullopt;
}

namespace {

enum class Section { none, parameters, rules, complex };

bool is_identifier(std::string_view s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

bool parse_flag(const std::string& token, int line) {
    if (token == "0") return false;
    if (token == "1") return true;
    throw ParseError("integer indicator must be 0 or 1, got '" + token + "'", line);
}

double number_at(const std::vector<std::string>& fields, std::size_t i, int line) {
    const auto v = parse_double(fields[i]);
    if (!v || !std::isfinite(*v)) throw ParseError("expected a number, got '" + fields[i] + "'", line);
    return *v;
}

PriorSpec parse_prior(std::vector<std::string> fields, int line) {
    if (fields.size() < 3) throw ParseError("parameter declaration needs '<0|1> <name> <prior> ...'", line);
    PriorSpec p;
    if (fields.back() == "output" || fields.back() == "hide") {
        p.output = fields.back() == "output";
        fields.pop_back();
    }
    p.integer = parse_flag(fields[0], line);
    p.name = fields[1];
    if (!is_identifier(p.name)) throw ParseError("invalid parameter name '" + p.name + "'", line);
    const std::string& kind = fields[2];
    const std::size_t nargs = fields.size() - 3;
    auto require = [&](std::size_t n) {
        if (nargs != n) {
            throw ParseError("prior '" + kind + "' takes " + std::to_string(n) + " argument(s), got " +
                             std::to_string(nargs), line);
        }
    };
    if (kind == "unif" || kind == "logunif") {
        require(2);
        p.kind = kind == "unif" ? PriorKind::uniform : PriorKind::log_uniform;
        p.min = number_at(fields, 3, line);
        p.max = number_at(fields, 4, line);
        if (!(p.min < p.max)) throw ParseError("prior bounds of '" + p.name + "' need min < max", line);
        if (p.kind == PriorKind::log_uniform && p.min <= 0.0) {
            throw ParseError("logunif prior of '" + p.name + "' needs a positive lower bound", line);
        }
    } else if (kind == "norm") {
        require(4);
        p.kind = PriorKind::normal;
        p.min = number_at(fields, 3, line);
        p.max = number_at(fields, 4, line);
        p.mean = number_at(fields, 5, line);
        p.sd = number_at(fields, 6, line);
        if (!(p.min < p.max)) throw ParseError("prior bounds of '" + p.name + "' need min < max", line);
        if (!(p.sd > 0.0)) throw ParseError("normal prior of '" + p.name + "' needs sd > 0", line);
    } else if (kind == "fixed") {
        require(1);
        p.kind = PriorKind::fixed;
        p.value = number_at(fields, 3, line);
    } else {
        throw ParseError("unknown prior kind '" + kind + "'", line);
    }
    return p;
}

Rule parse_rule(const std::string& text, int line, const std::set<std::string>& declared) {
    static const std::pair<std::string_view, RuleOp> ops[] = {
        {"<=", RuleOp::less_equal}, {">=", RuleOp::greater_equal}, {"<", RuleOp::less}, {">", RuleOp::greater}};
    for (const auto& [sym, op] : ops) {
        const auto at = text.find(sym);
        if (at == std::string::npos) continue;
        const auto lhs_fields = split_fields(text.substr(0, at));
        const auto rhs_fields = split_fields(text.substr(at + sym.size()));
        if (lhs_fields.size() != 1 || rhs_fields.size() != 1) throw ParseError("malformed rule '" + text + "'", line);
        Rule r;
        r.lhs = lhs_fields[0];
        r.op = op;
        if (!declared.count(r.lhs)) throw ParseError("rule uses undeclared identifier '" + r.lhs + "'", line);
        if (const auto v = parse_double(rhs_fields[0])) {
            r.rhs = *v;
        } else {
            if (!declared.count(rhs_fields[0])) {
                throw ParseError("rule uses undeclared identifier '" + rhs_fields[0] + "'", line);
            }
            r.rhs = rhs_fields[0];
        }
        return r;
    }
    throw ParseError("rule '" + text + "' has no comparison operator", line);
}

ComplexParam parse_complex(std::string text, int line, const std::set<std::string>& declared) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError("complex parameter needs '<0|1> <name> = <expression>'", line);
    const auto head = split_fields(text.substr(0, eq));
    if (head.size() != 2) throw ParseError("complex parameter needs '<0|1> <name> = <expression>'", line);
    std::string body = text.substr(eq + 1);
    bool output = true;
    const auto tail = split_fields(body);
    if (!tail.empty() && (tail.back() == "output" || tail.back() == "hide")) {
        output = tail.back() == "output";
        body = body.substr(0, body.rfind(tail.back()));
    }
    ComplexParam c{head[1], parse_flag(head[0], line), Expression::parse(body, line), output};
    if (!is_identifier(c.name)) throw ParseError("invalid parameter name '" + c.name + "'", line);
    for (const auto& id : c.expression.identifiers()) {
        if (!declared.count(id)) throw ParseError("expression uses undeclared identifier '" + id + "'", line);
    }
    return c;
}

}  // namespace

EstModel parse_est(std::string_view text) {
    EstModel model;
    std::set<std::string> declared;
    Section section = Section::none;
    bool saw_parameters = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    auto declare = [&](const std::string& name) {
        if (!declared.insert(name).second) throw ParseError("duplicate name '" + name + "'", line);
    };
    while (std::getline(in, raw)) {
        ++line;
        const auto first = raw.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        std::string content = raw.substr(first);
        while (!content.empty() && (content.back() == '\r' || content.back() == ' ' || content.back() == '\t')) {
            content.pop_back();
        }
        if (content.rfind("//", 0) == 0 || content[0] == '#') continue;
        if (content.front() == '[') {
            if (content == "[PARAMETERS]") {
                section = Section::parameters;
                saw_parameters = true;
            } else if (content == "[RULES]") {
                section = Section::rules;
            } else if (content == "[COMPLEX PARAMETERS]") {
                section = Section::complex;
            } else {
                throw ParseError("unknown section " + content, line);
            }
            continue;
        }
        switch (section) {
            case Section::none: throw ParseError("content before the [PARAMETERS] section", line);
            case Section::parameters: {
                PriorSpec p = parse_prior(split_fields(content), line);
                declare(p.name);
                model.priors.push_back(std::move(p));
                break;
            }
            case Section::rules: model.rules.push_back(parse_rule(content, line, declared)); break;
            case Section::complex: {
                ComplexParam c = parse_complex(content, line, declared);
                declare(c.name);
                model.complex.push_back(std::move(c));
                break;
            }
        }
    }
    if (!saw_parameters) throw ParseError("missing mandatory [PARAMETERS] section", line);
    if (model.priors.empty()) throw ParseError("[PARAMETERS] section declares no parameter", line);
    return model;
}

EstModel read_est(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open est file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_est(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2),
                         e.line(), e.column());
    }
}

std::optional<double> ParamDraw::value(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return values[i];
    }
    return std::nullopt;
}

std::vector<std::string> ParamDraw::output_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (output[i]) out.push_back(names[i]);
    }
    return out;
}

std::vector<double> ParamDraw::output_values() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (output[i]) out.push_back(values[i]);
    }
    return out;
}

PriorSampler::PriorSampler(EstModel model) : model_(std::move(model)) {
    if (model_.rules.empty()) return;
    // Fixed probe stream so the check does not perturb the caller's stream.
    Rng probe = make_stream(0x5eedULL, 0);
    constexpr int kProbe = 10000;
    int accepted = 0;
    for (int i = 0; i < kProbe; ++i) {
        if (complete(sample_raw(probe))) ++accepted;
    }
    if (accepted < kProbe / 1000) {
        throw ConfigError("degenerate rule system: only " + std::to_string(accepted) + " of " +
                          std::to_string(kProbe) + " prior draws satisfy the [RULES] section");
    }
}

double PriorSampler::draw_one(const PriorSpec& p, Rng& rng) const {
    switch (p.kind) {
        case PriorKind::fixed: return p.value;
        case PriorKind::uniform: return p.min + (p.max - p.min) * uniform01(rng);
        case PriorKind::log_uniform:
            return std::exp(std::log(p.min) + (std::log(p.max) - std::log(p.min)) * uniform01(rng));
        case PriorKind::normal: {
            const double lo = stats::normal_cdf(p.min, p.mean, p.sd);
            const double hi = stats::normal_cdf(p.max, p.mean, p.sd);
            if (hi - lo >= 1e-3) {
                std::normal_distribution<double> normal(p.mean, p.sd);
                for (;;) {
                    const double x = normal(rng);
                    if (x >= p.min && x <= p.max) return x;
                }
            }
            // Narrow window: inverse CDF on the truncated interval.
            const double u = lo + (hi - lo) * uniform01(rng);
            return std::clamp(stats::normal_quantile(std::clamp(u, 1e-300, 1.0 - 1e-16), p.mean, p.sd), p.min, p.max);
        }
    }
    return 0.0;
}

std::vector<double> PriorSampler::sample_raw(Rng& rng) const {
    std::vector<double> raw;
    raw.reserve(model_.priors.size());
    for (const auto& p : model_.priors) raw.push_back(draw_one(p, rng));
    return raw;
}

std::optional<ParamDraw> PriorSampler::complete(const std::vector<double>& raw) const {
    ParamDraw draw;
    const std::size_t total = model_.priors.size() + model_.complex.size();
    draw.names.reserve(total);
    draw.values.reserve(total);
    for (std::size_t i = 0; i < model_.priors.size(); ++i) {
        const auto& p = model_.priors[i];
        draw.names.push_back(p.name);
        draw.values.push_back(p.integer ? std::trunc(raw[i]) : raw[i]);
        draw.output.push_back(p.output);
    }
    const Bindings bind = [&](std::string_view name) { return draw.value(name); };
    for (const auto& c : model_.complex) {
        const double v = c.expression.evaluate(bind);
        draw.names.push_back(c.name);
        draw.values.push_back(c.integer ? std::trunc(v) : v);
        draw.output.push_back(c.output);
    }
    for (const auto& rule : model_.rules) {
        const double a = *draw.value(rule.lhs);
        const double b = std::holds_alternative<double>(rule.rhs) ? std::get<double>(rule.rhs)
                                                                  : *draw.value(std::get<std::string>(rule.rhs));
        if (!rule.holds(a, b)) return std::nullopt;
    }
    return draw;
}

ParamDraw PriorSampler::sample(Rng& rng) const {
    for (;;) {
        if (auto draw = complete(sample_raw(rng))) return *std::move(draw);
    }
}

double PriorSampler::prior_density(const std::vector<double>& raw) const {
    double d = 1.0;
    for (std::size_t i = 0; i < model_.priors.size(); ++i) d *= model_.priors[i].density(raw[i]);
    return d;
}

}  // namespace abctk
