#include "abctk/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace abctk {

struct Expression::Node {
    enum class Kind { number, identifier, negate, binary, call };
    Kind kind = Kind::number;
    double number = 0.0;
    std::string name;  // identifier or function name
    char op = 0;       // binary operator
    std::vector<Node> children;
};

namespace {

using Node = Expression::Node;

struct FunctionInfo {
    std::string_view name;
    std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"exp", 1}, {"log", 1}, {"log10", 1}, {"pow10", 1}, {"sqrt", 1},
    {"abs", 1}, {"min", 2}, {"max", 2},   {"pow", 2},
};

const FunctionInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

class Parser {
  public:
    Parser(std::string_view text, int line) : text_(text), line_(line) {}

    Node parse() {
        Node n = expr();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return n;
    }

  private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression '" + std::string(text_) + "': " + what, line_, static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Node expr() {
        Node lhs = term();
        for (;;) {
            if (accept('+')) lhs = binary('+', std::move(lhs), term());
            else if (accept('-')) lhs = binary('-', std::move(lhs), term());
            else return lhs;
        }
    }

    Node term() {
        Node lhs = unary();
        for (;;) {
            if (accept('*')) lhs = binary('*', std::move(lhs), unary());
            else if (accept('/')) lhs = binary('/', std::move(lhs), unary());
            else return lhs;
        }
    }

    Node unary() {
        if (accept('-')) {
            Node n;
            n.kind = Node::Kind::negate;
            n.children.push_back(unary());
            return n;
        }
        if (accept('+')) return unary();
        return power();
    }

    Node power() {
        Node base = atom();
        if (accept('^')) return binary('^', std::move(base), unary());
        return base;
    }

    Node atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Node inner = expr();
            if (!accept(')')) fail("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            std::string name(text_.substr(start, pos_ - start));
            if (accept('(')) return call(std::move(name), start);
            Node n;
            n.kind = Node::Kind::identifier;
            n.name = std::move(name);
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Node number() {
        const std::string rest(text_.substr(pos_));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - rest.c_str());
        Node n;
            n.kind = Node::Kind::number;
        n.number = v;
        return n;
    }

    Node call(std::string name, std::size_t start) {
        const FunctionInfo* info = find_function(name);
        if (!info) {
            pos_ = start;
            fail("unknown function '" + name + "'");
        }
        Node n;
            n.kind = Node::Kind::call;
        n.name = std::move(name);
        if (!accept(')')) {
            do {
                n.children.push_back(expr());
            } while (accept(','));
            if (!accept(')')) fail("missing ')' after arguments of " + n.name);
        }
        if (n.children.size() != info->arity) {
            pos_ = start;
            fail(n.name + " takes " + std::to_string(info->arity) + " argument(s), got " +
                 std::to_string(n.children.size()));
        }
        return n;
    }

    static Node binary(char op, Node lhs, Node rhs) {
        Node n;
            n.kind = Node::Kind::binary;
        n.op = op;
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    std::string_view text_;
    int line_;
    std::size_t pos_ = 0;
};

std::string render(const Node& n) {
    switch (n.kind) {
        case Node::Kind::number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", n.number);
            return buf;
        }
        case Node::Kind::identifier: return n.name;
        case Node::Kind::negate: return "-(" + render(n.children[0]) + ")";
        case Node::Kind::binary:
            return "(" + render(n.children[0]) + " " + std::string(1, n.op) + " " + render(n.children[1]) + ")";
        case Node::Kind::call: {
            std::string out = n.name + "(";
            for (std::size_t i = 0; i < n.children.size(); ++i) out += (i ? ", " : "") + render(n.children[i]);
            return out + ")";
        }
    }
    return {};
}

double eval(const Node& n, const Bindings& bindings) {
    auto fail = [&](const std::string& why) -> double { throw EvalError(why + " in '" + render(n) + "'"); };
    switch (n.kind) {
        case Node::Kind::number: return n.number;
        case Node::Kind::identifier: {
            const auto v = bindings ? bindings(n.name) : std::nullopt;
            if (!v) return fail("unbound identifier '" + n.name + "'");
            return *v;
        }
        case Node::Kind::negate: return -eval(n.children[0], bindings);
        case Node::Kind::binary: {
            const double a = eval(n.children[0], bindings);
            const double b = eval(n.children[1], bindings);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return b == 0.0 ? fail("division by zero") : a / b;
                case '^': {
                    const double r = std::pow(a, b);
                    return std::isnan(r) ? fail("undefined power") : r;
                }
            }
            return fail("unknown operator");
        }
        case Node::Kind::call: {
            const double a = eval(n.children[0], bindings);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "log") return a <= 0.0 ? fail("log of non-positive value") : std::log(a);
            if (n.name == "log10") return a <= 0.0 ? fail("log10 of non-positive value") : std::log10(a);
            if (n.name == "pow10") return std::pow(10.0, a);
            if (n.name == "sqrt") return a < 0.0 ? fail("sqrt of negative value") : std::sqrt(a);
            if (n.name == "abs") return std::abs(a);
            const double b = eval(n.children[1], bindings);
            if (n.name == "min") return std::min(a, b);
            if (n.name == "max") return std::max(a, b);
            if (n.name == "pow") {
                const double r = std::pow(a, b);
                return std::isnan(r) ? fail("undefined power") : r;
            }
            return fail("unknown function");
        }
    }
    return fail("corrupt expression");
}

void collect(const Node& n, std::vector<std::string>& out) {
    if (n.kind == Node::Kind::identifier) {
        if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
    }
    for (const auto& c : n.children) collect(c, out);
}

}  // namespace

Expression Expression::parse(std::string_view text, int line) {
    return Expression(std::make_shared<const Node>(Parser(text, line).parse()));
}

double Expression::evaluate(const Bindings& bindings) const { return eval(*root_, bindings); }

std::vector<std::string> Expression::identifiers() const {
    std::vector<std::string> out;
    collect(*root_, out);
    return out;
}

std::string Expression::to_string() const { return render(*root_); }

}  // namespace abctk
