#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abctk/expression.hpp"
#include "abctk/random.hpp"

namespace abctk {

enum class PriorKind { uniform, log_uniform, normal, fixed };

/// One line of the [PARAMETERS] section: `<int 0/1> <name> <kind> <args...> [output|hide]`.
struct PriorSpec {
    std::string name;
    bool integer = false;
    PriorKind kind = PriorKind::uniform;
    double min = 0.0;    // unif, logunif, norm
    double max = 0.0;    // unif, logunif, norm
    double mean = 0.0;   // norm
    double sd = 1.0;     // norm
    double value = 0.0;  // fixed
    bool output = true;

    bool is_fixed() const { return kind == PriorKind::fixed; }
    double lower() const { return is_fixed() ? value : min; }
    double upper() const { return is_fixed() ? value : max; }

    /// Unnormalized-free prior density of a raw value (0 outside the support).
    /// Fixed priors have density 1 at their value.
    double density(double x) const;
};

enum class RuleOp { less, greater, less_equal, greater_equal };

/// `lhs op rhs` from the [RULES] section; rhs is a name or a constant.
struct Rule {
    std::string lhs;
    RuleOp op = RuleOp::greater;
    std::variant<std::string, double> rhs;

    bool holds(double a, double b) const;
    std::string to_string() const;
};

/// `<int 0/1> <name> = <expression> [output|hide]` from [COMPLEX PARAMETERS].
struct ComplexParam {
    std::string name;
    bool integer = false;
    Expression expression;
    bool output = true;
};

struct EstModel {
    std::vector<PriorSpec> priors;
    std::vector<Rule> rules;
    std::vector<ComplexParam> complex;

    /// Every declared name: priors first, then complex parameters.
    std::vector<std::string> names() const;
    std::optional<std::size_t> prior_index(std::string_view name) const;
};

/// Parses an est file. Lines starting with `//` or `#` are comments.
/// Either returns a complete model or throws ParseError with the line number.
EstModel parse_est(std::string_view text);
EstModel read_est(const std::filesystem::path& path);

/// A full parameter draw: raw prior values followed by complex values, in declaration order.
struct ParamDraw {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<bool> output;

    std::optional<double> value(std::string_view name) const;
    std::vector<std::string> output_names() const;
    std::vector<double> output_values() const;
};

/// Draws parameter vectors from an EstModel.
///
/// Rules are enforced by rejecting the whole raw draw. Construction probes the rule
/// system with 10^4 draws and throws ConfigError when fewer than 0.1% satisfy it.
class PriorSampler {
  public:
    explicit PriorSampler(EstModel model);

    const EstModel& model() const { return model_; }

    ParamDraw sample(Rng& rng) const;

    /// Raw prior values only (no rules, no complex evaluation).
    std::vector<double> sample_raw(Rng& rng) const;

    /// Applies integer truncation, evaluates complex parameters and checks the rules.
    /// Returns nullopt when a rule fails.
    std::optional<ParamDraw> complete(const std::vector<double>& raw) const;

    /// Product of the raw prior densities.
    double prior_density(const std::vector<double>& raw) const;

    std::size_t raw_size() const { return model_.priors.size(); }

  private:
    double draw_one(const PriorSpec& prior, Rng& rng) const;

    EstModel model_;
};

}  // namespace abctk
