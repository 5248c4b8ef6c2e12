#pragma once

#include <stdexcept>
#include <string>

namespace abctk {

/// Base of every error raised by the toolkit. The CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad settings, malformed definition files, missing keys.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Unreadable or unwritable files, malformed tables.
class IoError : public Error {
  public:
    using Error::Error;
};

/// Singular systems, non positive definite covariances, invalid arithmetic.
class NumericalError : public Error {
  public:
    using Error::Error;
};

/// Design matrix of a regression adjustment is collinear; the ridge variant handles it.
class CollinearityError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// External or built-in simulator failures.
class SimulatorError : public Error {
  public:
    using Error::Error;
};

/// Positioned error from the est-file parser or the expression parser.
class ParseError : public ConfigError {
  public:
    ParseError(const std::string& what, int line, int column = 0)
        : ConfigError(format(what, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

  private:
    static std::string format(const std::string& what, int line, int column) {
        std::string out = "line " + std::to_string(line);
        if (column > 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    int line_;
    int column_;
};

}  // namespace abctk
