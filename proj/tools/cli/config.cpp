#include "config.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

#include "abctk/error.hpp"
#include "abctk/log.hpp"
#include "abctk/random.hpp"
#include "abctk/table_io.hpp"

namespace abctk::cli {

namespace {

constexpr std::string_view kKnownKeys[] = {
    "task", "estimationType", "params", "simName", "obsName", "numRetained", "maxReadSims",
    "pruneCorrelatedStats", "maxCor", "outputPrefix", "writeRetained", "standardizeStats", "obsPValue",
    "tukeyPValue", "tukeyProjections", "modelChoiceValidation", "randomValidation", "retainedValidation",
    "posteriorDensityPoints", "diracPeakWidth", "jointPosteriors", "jointPosteriorDensityPoints",
    "modelChoiceMethod", "tolerance", "samplerType", "numSims", "outName", "estName", "simProgram", "simArgs",
    "simInputName", "sumStatProgram", "sumStatArgs", "sumStatName", "simProtocol", "doBoxCox", "linearCombName",
    "numLinearComb", "doBoosting", "numCaliSims", "thresholdProp", "rangeProp", "startingPoint", "mcmcSampling",
    "burnin", "maxCorSSFinder", "seed", "threads", "plotData", "input", "output", "numComponents", "folds",
    "scratchDir", "quiet",
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

bool readable_file(const std::string& path) {
    std::error_code ec;
    return std::filesystem::is_regular_file(path, ec);
}

}  // namespace

std::string canonical_key(const std::string& key) {
    if (key == "marDensPValue") return "obsPValue";
    if (key == "linearComb") return "linearCombName";
    return key;
}

bool known_key(const std::string& key) {
    return std::find(std::begin(kKnownKeys), std::end(kKnownKeys), key) != std::end(kKnownKeys);
}

Config Config::from_text(const std::string& text, const std::string& source) {
    Config config;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#' || line.rfind("//", 0) == 0) continue;
        const auto split = line.find_first_of(" \t");
        const std::string key = line.substr(0, split);
        const std::string value = split == std::string::npos ? std::string() : trim(line.substr(split));
        if (key.find('=') != std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key value', found '" + line + "'");
        }
        config.set(key, value);
    }
    return config;
}

Config Config::from_args(const std::vector<std::string>& args) {
    Config config;
    std::vector<std::pair<std::string, std::string>> overrides;
    bool have_input = false;
    for (const auto& arg : args) {
        const auto eq = arg.find('=');
        if (eq != std::string::npos) {
            if (eq == 0) throw ConfigError("argument '" + arg + "' has no key");
            overrides.emplace_back(arg.substr(0, eq), arg.substr(eq + 1));
        } else if (!have_input && readable_file(arg)) {
            std::ifstream in(arg);
            std::stringstream ss;
            ss << in.rdbuf();
            config = from_text(ss.str(), arg);
            have_input = true;
        } else {
            overrides.emplace_back(arg, std::string());
        }
    }
    for (auto& [k, v] : overrides) config.set(k, std::move(v));
    return config;
}

void Config::set(const std::string& key, std::string value) {
    const auto k = canonical_key(key);
    for (auto& [name, v] : entries_) {
        if (name == k) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(k, std::move(value));
}

bool Config::has(const std::string& key) const { return find(key).has_value(); }

std::optional<std::string> Config::find(const std::string& key) const {
    const auto k = canonical_key(key);
    for (const auto& [name, v] : entries_) {
        if (name == k) return v;
    }
    return std::nullopt;
}

const std::string& Config::required(const std::string& key) const {
    const auto k = canonical_key(key);
    for (const auto& [name, v] : entries_) {
        if (name == k) {
            if (v.empty()) throw ConfigError("setting '" + key + "' needs a value");
            return v;
        }
    }
    throw ConfigError("missing required setting '" + key + "'");
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto v = find(key);
    return v && !v->empty() ? *v : fallback;
}

std::optional<double> Config::number(const std::string& key) const {
    const auto v = find(key);
    if (!v) return std::nullopt;
    const auto parsed = parse_double(*v);
    if (!parsed || !std::isfinite(*parsed)) throw ConfigError("setting '" + key + "' expects a number, got '" + *v + "'");
    return parsed;
}

double Config::number(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

std::optional<std::size_t> Config::count(const std::string& key) const {
    const auto v = number(key);
    if (!v) return std::nullopt;
    if (*v < 0 || *v != std::floor(*v)) throw ConfigError("setting '" + key + "' expects a non-negative integer");
    return static_cast<std::size_t>(*v);
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const { return count(key).value_or(fallback); }

bool Config::flag(const std::string& key, bool fallback) const {
    const auto v = find(key);
    if (!v) return fallback;
    if (v->empty() || *v == "1" || *v == "true" || *v == "yes") return true;
    if (*v == "0" || *v == "false" || *v == "no") return false;
    throw ConfigError("setting '" + key + "' expects 0 or 1, got '" + *v + "'");
}

std::uint64_t Config::seed() {
    if (const auto v = find("seed")) {
        try {
            std::size_t used = 0;
            const auto s = std::stoull(*v, &used);
            if (used == v->size()) return s;
        } catch (const std::exception&) {
        }
        throw ConfigError("setting 'seed' expects a non-negative integer, got '" + *v + "'");
    }
    const auto s = entropy_seed();
    set("seed", std::to_string(s));
    return s;
}

void Config::warn_unknown() const {
    for (const auto& [k, v] : entries_) {
        if (!known_key(k)) log::warn("unknown setting '" + k + "' ignored");
    }
}

}  // namespace abctk::cli
