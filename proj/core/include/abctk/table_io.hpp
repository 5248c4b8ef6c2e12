#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace abctk {

/// Rows of (parameter vector, statistic vector) with named columns.
///
/// Columns that are neither parameters nor statistics requested downstream are
/// kept; they are simply never selected.
struct SimulationTable {
    std::vector<std::string> column_names;
    Eigen::MatrixXd values;                  // one row per simulation
    std::vector<std::size_t> param_columns;  // 0-based, in spec order

    std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t cols() const { return column_names.size(); }

    std::optional<std::size_t> column_index(std::string_view name) const;
    std::vector<std::string> param_names() const;
    /// Every column that is not a parameter, in file order.
    std::vector<std::size_t> stat_columns() const;
    std::vector<std::string> stat_names() const;
};

struct ObservedStats {
    std::vector<std::string> names;
    std::vector<double> values;
};

struct ReadOptions {
    std::size_t max_rows = std::numeric_limits<std::size_t>::max();
};

struct ReadReport {
    std::size_t rows_kept = 0;
    std::size_t rows_non_finite = 0;  // rejected, see warning log
};

/// Parses "1-2", "1,3,5-7" (1-based, inclusive) into 0-based column indices.
std::vector<std::size_t> parse_column_ranges(std::string_view spec, std::size_t column_count);

/// Splits a multi-model setting such as "simNorm.txt;simUnif.txt".
std::vector<std::string> split_models(std::string_view value);

SimulationTable read_table(const std::filesystem::path& path, std::string_view param_spec,
                           const ReadOptions& options = {}, ReadReport* report = nullptr);
SimulationTable parse_table(std::istream& in, std::string_view param_spec, const std::string& source,
                            const ReadOptions& options = {}, ReadReport* report = nullptr);

/// One ObservedStats per value line of the file.
std::vector<ObservedStats> read_observed(const std::filesystem::path& path);
std::vector<ObservedStats> parse_observed(std::istream& in, const std::string& source);

enum class OutputTag {
    BestSimsParamStats,
    MarginalPosteriorDensities,
    MarginalPosteriorCharacteristics,
    jointPosterior,
    modelFit,
    RandomValidation,
    RetainedValidation,
    modelChoiceValidation,
    confusionMatrix,
    searchStatsgreedySearch,
};

std::string_view tag_name(OutputTag tag);

/// Components of an output filename: `<prefix>[_model<m>]_<tag>[_<suffix>][_Obs<o>].txt`.
struct OutputName {
    std::string prefix;
    std::optional<int> model;
    OutputTag tag;
    std::string suffix;  // e.g. "1_2" for a joint posterior of parameters 1 and 2
    std::optional<int> obs;

    std::string filename() const;
};

/// Numbers as written to every output file: 6 significant digits, scientific notation
/// below 1e-4 or from 1e6 in magnitude, "NA" for NaN.
std::string format_number(double x);

/// Tab separated header line plus one line per row.
void write_table(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows);
void write_text_table(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

std::filesystem::path write_tagged(const std::filesystem::path& directory, const OutputName& name,
                                   const std::vector<std::string>& header, const Eigen::MatrixXd& payload);
std::filesystem::path write_tagged(const std::filesystem::path& directory, const OutputName& name,
                                   const SimulationTable& payload);
std::filesystem::path write_tagged_text(const std::filesystem::path& directory, const OutputName& name,
                                        const std::vector<std::string>& header,
                                        const std::vector<std::vector<std::string>>& rows);

/// Whitespace tokenizer shared by every reader (runs of tabs and spaces separate fields).
std::vector<std::string> split_fields(std::string_view line);

/// Strict numeric parse; accepts "nan"/"inf" spellings, rejects trailing garbage.
std::optional<double> parse_double(std::string_view token);

}  // namespace abctk
