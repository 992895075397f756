#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wirecalc/errors.hpp"

namespace wirecalc {

using Env = std::map<std::string, double>;

/// An immutable expression tree over reals: literals, variables, field
/// operations, integer powers, and {sin, cos, exp, tanh}.
class Expr {
public:
    static Expr constant(double value);
    static Expr var(std::string name);
    static Expr call(const std::string& function, Expr argument);
    static Expr pow(Expr base, long long exponent);

    Expr operator+(const Expr& other) const;
    Expr operator-(const Expr& other) const;
    Expr operator*(const Expr& other) const;
    Expr operator/(const Expr& other) const;
    Expr operator-() const;

    double eval(const Env& env) const;
    Expr diff(const std::string& variable) const;
    Expr substitute(const std::map<std::string, Expr>& bindings) const;

    void collect_variables(std::set<std::string>& out) const;
    std::set<std::string> variables() const;

    std::string to_string() const;
    bool structurally_equal(const Expr& other) const;

    bool is_constant() const;
    double constant_value() const;  // valid only when is_constant()

    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

/// Parses with standard precedence (power > unary minus > mul/div > add/sub),
/// left associativity for the binary operators. Errors carry line:column.
Expr parse_expr(std::string_view text);

const std::set<std::string>& known_functions();

}  // namespace wirecalc
