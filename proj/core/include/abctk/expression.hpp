#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abctk/error.hpp"

namespace abctk {

/// Raised when an expression cannot be evaluated; the message names the failing node.
class EvalError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

/// Resolves an identifier to its current value, or nullopt when unbound.
using Bindings = std::function<std::optional<double>(std::string_view)>;

/// Infix arithmetic over identifiers and constants.
///
/// Grammar (whitespace insensitive, `^` right associative and binding tighter than unary minus):
///
///     expr   := term (('+' | '-') term)*
///     term   := unary (('*' | '/') unary)*
///     unary  := '-' unary | '+' unary | power
///     power  := atom ('^' unary)?
///     atom   := number | identifier | identifier '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Functions: exp, log, log10, pow10, sqrt, abs (one argument), min, max, pow (two).
class Expression {
  public:
    struct Node;

    /// Throws ParseError positioned at `line` and the offending column.
    static Expression parse(std::string_view text, int line = 0);

    double evaluate(const Bindings& bindings) const;

    /// Identifiers referenced anywhere in the tree, in first-use order.
    std::vector<std::string> identifiers() const;

    std::string to_string() const;

  private:
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace abctk
