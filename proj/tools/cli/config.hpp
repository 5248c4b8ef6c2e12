#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace abctk::cli {

/// Flat key/value settings: an optional input file (`key value` per line) overridden by
/// `key=value` command-line tokens. A bare key (`writeRetained`) is a flag with an empty value.
class Config {
  public:
    /// First bare token naming a readable file is the input file; other bare tokens are flags.
    static Config from_args(const std::vector<std::string>& args);
    static Config from_text(const std::string& text, const std::string& source);

    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;

    /// Throws ConfigError when the key is absent.
    const std::string& required(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    std::optional<std::string> find(const std::string& key) const;

    double number(const std::string& key, double fallback) const;
    std::optional<double> number(const std::string& key) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::optional<std::size_t> count(const std::string& key) const;
    /// Present without value, or with 1/true/yes, is true; 0/false/no is false.
    bool flag(const std::string& key, bool fallback = false) const;

    /// `seed` when set, system entropy otherwise; stored back so it is logged.
    std::uint64_t seed();

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    /// Warns once about every key that no task understands.
    void warn_unknown() const;

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Canonical spelling of a key (marDensPValue -> obsPValue, linearComb -> linearCombName).
std::string canonical_key(const std::string& key);

bool known_key(const std::string& key);

}  // namespace abctk::cli
