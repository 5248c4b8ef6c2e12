#include "abctk/table_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "abctk/error.hpp"
#include "abctk/log.hpp"

namespace abctk {

std::optional<std::size_t> SimulationTable::column_index(std::string_view name) const {
    const auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - column_names.begin());
}

std::vector<std::string> SimulationTable::param_names() const {
    std::vector<std::string> out;
    for (auto c : param_columns) out.push_back(column_names[c]);
    return out;
}

std::vector<std::size_t> SimulationTable::stat_columns() const {
    std::vector<std::size_t> out;
    for (std::size_t c = 0; c < cols(); ++c) {
        if (std::find(param_columns.begin(), param_columns.end(), c) == param_columns.end()) out.push_back(c);
    }
    return out;
}

std::vector<std::string> SimulationTable::stat_names() const {
    std::vector<std::string> out;
    for (auto c : stat_columns()) out.push_back(column_names[c]);
    return out;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

std::optional<double> parse_double(std::string_view token) {
    if (token.empty()) return std::nullopt;
    const std::string s(token);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return std::nullopt;
    if (errno == ERANGE && std::abs(v) > 1.0) return std::nullopt;
    return v;
}

std::vector<std::size_t> parse_column_ranges(std::string_view spec, std::size_t column_count) {
    std::vector<std::size_t> out;
    std::string token;
    std::stringstream ss{std::string(spec)};
    auto fail = [&](const std::string& why) {
        throw ConfigError("invalid column specification '" + std::string(spec) + "': " + why);
    };
    while (std::getline(ss, token, ',')) {
        if (token.empty()) fail("empty range");
        const auto dash = token.find('-');
        const std::string a = token.substr(0, dash);
        const std::string b = dash == std::string::npos ? a : token.substr(dash + 1);
        const auto lo = parse_double(a);
        const auto hi = parse_double(b);
        if (!lo || !hi || *lo != std::floor(*lo) || *hi != std::floor(*hi)) fail("'" + token + "' is not a range");
        if (*lo < 1 || *hi < *lo) fail("'" + token + "' is an empty range");
        if (*hi > static_cast<double>(column_count)) fail("'" + token + "' exceeds the " + std::to_string(column_count) + " columns");
        for (auto c = static_cast<std::size_t>(*lo); c <= static_cast<std::size_t>(*hi); ++c) {
            if (std::find(out.begin(), out.end(), c - 1) == out.end()) out.push_back(c - 1);
        }
    }
    if (out.empty()) fail("no columns selected");
    return out;
}

std::vector<std::string> split_models(std::string_view value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto end = value.find(';', start);
        std::string part(value.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        const auto first = part.find_first_not_of(" \t'\"");
        const auto last = part.find_last_not_of(" \t'\"");
        part = first == std::string::npos ? std::string() : part.substr(first, last - first + 1);
        if (!part.empty()) out.push_back(part);
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

SimulationTable parse_table(std::istream& in, std::string_view param_spec, const std::string& source,
                            const ReadOptions& options, ReadReport* report) {
    std::string line;
    int line_no = 0;
    SimulationTable table;
    while (std::getline(in, line)) {
        ++line_no;
        table.column_names = split_fields(line);
        if (!table.column_names.empty()) break;
    }
    if (table.column_names.empty()) throw IoError(source + ": missing header line");
    {
        std::set<std::string> seen;
        for (const auto& name : table.column_names) {
            if (parse_double(name) && name.find_first_not_of("0123456789.eE+-") == std::string::npos) {
                throw IoError(source + ":" + std::to_string(line_no) + ": malformed header, '" + name + "' is a number");
            }
            if (!seen.insert(name).second) {
                throw IoError(source + ":" + std::to_string(line_no) + ": duplicate column '" + name + "'");
            }
        }
    }
    table.param_columns = parse_column_ranges(param_spec, table.column_names.size());

    const std::size_t ncol = table.column_names.size();
    std::vector<double> buffer;
    std::size_t kept = 0, non_finite = 0;
    while (kept < options.max_rows && std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != ncol) {
            throw IoError(source + ":" + std::to_string(line_no) + ": ragged row with " + std::to_string(fields.size()) +
                          " fields, header has " + std::to_string(ncol));
        }
        bool finite = true;
        for (const auto& f : fields) {
            const auto v = parse_double(f);
            if (!v) throw IoError(source + ":" + std::to_string(line_no) + ": non-numeric cell '" + f + "'");
            finite = finite && std::isfinite(*v);
            buffer.push_back(*v);
        }
        if (!finite) {
            buffer.resize(buffer.size() - ncol);
            ++non_finite;
            continue;
        }
        ++kept;
    }
    if (non_finite > 0) {
        log::warn(source + ": rejected " + std::to_string(non_finite) + " row(s) with non-finite values");
    }
    table.values.resize(static_cast<Eigen::Index>(kept), static_cast<Eigen::Index>(ncol));
    for (std::size_t r = 0; r < kept; ++r) {
        for (std::size_t c = 0; c < ncol; ++c) table.values(r, c) = buffer[r * ncol + c];
    }
    if (report) *report = ReadReport{kept, non_finite};
    return table;
}

SimulationTable read_table(const std::filesystem::path& path, std::string_view param_spec,
                           const ReadOptions& options, ReadReport* report) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open simulation file '" + path.string() + "'");
    return parse_table(in, param_spec, path.string(), options, report);
}

std::vector<ObservedStats> parse_observed(std::istream& in, const std::string& source) {
    std::string line;
    int line_no = 0;
    std::vector<std::string> names;
    while (names.empty() && std::getline(in, line)) {
        ++line_no;
        names = split_fields(line);
    }
    if (names.empty()) throw IoError(source + ": missing header line");
    if (std::set<std::string>(names.begin(), names.end()).size() != names.size()) {
        throw IoError(source + ": duplicate statistic names in header");
    }
    std::vector<ObservedStats> out;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = split_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != names.size()) {
            throw IoError(source + ":" + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                          " values for " + std::to_string(names.size()) + " names");
        }
        ObservedStats obs{names, {}};
        for (const auto& f : fields) {
            const auto v = parse_double(f);
            if (!v || !std::isfinite(*v)) {
                throw IoError(source + ":" + std::to_string(line_no) + ": invalid value '" + f + "'");
            }
            obs.values.push_back(*v);
        }
        out.push_back(std::move(obs));
    }
    if (out.empty()) throw IoError(source + ": no observed values after the header line");
    return out;
}

std::vector<ObservedStats> read_observed(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open observed statistics file '" + path.string() + "'");
    return parse_observed(in, path.string());
}

std::string_view tag_name(OutputTag tag) {
    switch (tag) {
        case OutputTag::BestSimsParamStats: return "BestSimsParamStats";
        case OutputTag::MarginalPosteriorDensities: return "MarginalPosteriorDensities";
        case OutputTag::MarginalPosteriorCharacteristics: return "MarginalPosteriorCharacteristics";
        case OutputTag::jointPosterior: return "jointPosterior";
        case OutputTag::modelFit: return "modelFit";
        case OutputTag::RandomValidation: return "RandomValidation";
        case OutputTag::RetainedValidation: return "RetainedValidation";
        case OutputTag::modelChoiceValidation: return "modelChoiceValidation";
        case OutputTag::confusionMatrix: return "confusionMatrix";
        case OutputTag::searchStatsgreedySearch: return "searchStatsgreedySearch";
    }
    return "unknown";
}

std::string OutputName::filename() const {
    std::string out = prefix;
    if (model) out += "_model" + std::to_string(*model);
    out += "_";
    out += tag_name(tag);
    if (!suffix.empty()) out += "_" + suffix;
    if (obs) out += "_Obs" + std::to_string(*obs);
    return out + ".txt";
}

std::string format_number(double x) {
    if (std::isnan(x)) return "NA";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void write_table(std::ostream& out, const std::vector<std::string>& header, const Eigen::MatrixXd& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
    out << '\n';
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
        for (Eigen::Index c = 0; c < rows.cols(); ++c) out << (c ? "\t" : "") << format_number(rows(r, c));
        out << '\n';
    }
}

void write_text_table(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "\t" : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
        out << '\n';
    }
}

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

std::filesystem::path write_tagged(const std::filesystem::path& directory, const OutputName& name,
                                   const std::vector<std::string>& header, const Eigen::MatrixXd& payload) {
    if (payload.rows() == 0) throw IoError("refusing to write empty " + std::string(tag_name(name.tag)) + " output");
    if (static_cast<std::size_t>(payload.cols()) != header.size()) {
        throw IoError("header/payload width mismatch for " + name.filename());
    }
    const auto path = directory / name.filename();
    auto out = open_output(path);
    write_table(out, header, payload);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    return path;
}

std::filesystem::path write_tagged(const std::filesystem::path& directory, const OutputName& name,
                                   const SimulationTable& payload) {
    return write_tagged(directory, name, payload.column_names, payload.values);
}

std::filesystem::path write_tagged_text(const std::filesystem::path& directory, const OutputName& name,
                                        const std::vector<std::string>& header,
                                        const std::vector<std::vector<std::string>>& rows) {
    if (rows.empty()) throw IoError("refusing to write empty " + std::string(tag_name(name.tag)) + " output");
    const auto path = directory / name.filename();
    auto out = open_output(path);
    write_text_table(out, header, rows);
    if (!out) throw IoError("failed writing '" + path.string() + "'");
    return path;
}

}  // namespace abctk
