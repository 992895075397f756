#include "wirecalc/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace wirecalc {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Call };

struct Expr::Node {
    Op op;
    double value = 0.0;          // Const
    std::string name;            // Var, Call
    long long exponent = 0;      // Pow
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make_node(Expr::Node n) { return std::make_shared<const Expr::Node>(std::move(n)); }

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

// identity/zero folding only, so printed derivatives stay auditable
NodePtr simplify_add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_node({Op::Add, 0.0, "", 0, std::move(a), std::move(b)});
}

NodePtr simplify_neg(NodePtr a) {
    if (a->op == Op::Const) return make_node({Op::Const, -a->value, "", 0, nullptr, nullptr});
    return make_node({Op::Neg, 0.0, "", 0, std::move(a), nullptr});
}

NodePtr simplify_sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return simplify_neg(std::move(b));
    return make_node({Op::Sub, 0.0, "", 0, std::move(a), std::move(b)});
}

NodePtr simplify_mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0))
        return make_node({Op::Const, 0.0, "", 0, nullptr, nullptr});
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_node({Op::Mul, 0.0, "", 0, std::move(a), std::move(b)});
}

NodePtr simplify_div(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return a;
    if (is_const(b, 1.0)) return a;
    return make_node({Op::Div, 0.0, "", 0, std::move(a), std::move(b)});
}

NodePtr simplify_pow(NodePtr base, long long exponent) {
    if (exponent == 0) return make_node({Op::Const, 1.0, "", 0, nullptr, nullptr});
    if (exponent == 1) return base;
    return make_node({Op::Pow, 0.0, "", exponent, std::move(base), nullptr});
}

int precedence(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

}  // namespace

const std::set<std::string>& known_functions() {
    static const std::set<std::string> fns = {"sin", "cos", "exp", "tanh"};
    return fns;
}

Expr Expr::constant(double value) {
    return Expr(make_node({Op::Const, value, "", 0, nullptr, nullptr}));
}

Expr Expr::var(std::string name) {
    return Expr(make_node({Op::Var, 0.0, std::move(name), 0, nullptr, nullptr}));
}

Expr Expr::call(const std::string& function, Expr argument) {
    if (!known_functions().count(function))
        throw Error(ErrorKind::ParseError, "unknown function '" + function + "'");
    return Expr(make_node({Op::Call, 0.0, function, 0, argument.node_, nullptr}));
}

Expr Expr::pow(Expr base, long long exponent) {
    return Expr(simplify_pow(base.node_, exponent));
}

Expr Expr::operator+(const Expr& o) const { return Expr(simplify_add(node_, o.node_)); }
Expr Expr::operator-(const Expr& o) const { return Expr(simplify_sub(node_, o.node_)); }
Expr Expr::operator*(const Expr& o) const { return Expr(simplify_mul(node_, o.node_)); }
Expr Expr::operator/(const Expr& o) const { return Expr(simplify_div(node_, o.node_)); }
Expr Expr::operator-() const { return Expr(simplify_neg(node_)); }

double Expr::eval(const Env& env) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Var: {
            auto it = env.find(n.name);
            if (it == env.end())
                throw Error(ErrorKind::EvalError, "missing variable '" + n.name + "'");
            return it->second;
        }
        case Op::Add: return Expr(n.a).eval(env) + Expr(n.b).eval(env);
        case Op::Sub: return Expr(n.a).eval(env) - Expr(n.b).eval(env);
        case Op::Mul: return Expr(n.a).eval(env) * Expr(n.b).eval(env);
        case Op::Div: {
            double v = Expr(n.a).eval(env) / Expr(n.b).eval(env);
            if (!std::isfinite(v))
                throw Error(ErrorKind::EvalError, "non-finite result of division");
            return v;
        }
        case Op::Neg: return -Expr(n.a).eval(env);
        case Op::Pow: {
            double base = Expr(n.a).eval(env);
            double v = std::pow(base, static_cast<double>(n.exponent));
            if (!std::isfinite(v))
                throw Error(ErrorKind::EvalError, "non-finite result of power");
            return v;
        }
        case Op::Call: {
            double a = Expr(n.a).eval(env);
            if (n.name == "sin") return std::sin(a);
            if (n.name == "cos") return std::cos(a);
            if (n.name == "exp") return std::exp(a);
            if (n.name == "tanh") return std::tanh(a);
            throw Error(ErrorKind::Internal, "unreachable function");
        }
    }
    throw Error(ErrorKind::Internal, "unreachable expression op");
}

Expr Expr::diff(const std::string& v) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return constant(0.0);
        case Op::Var: return constant(n.name == v ? 1.0 : 0.0);
        case Op::Add: return Expr(n.a).diff(v) + Expr(n.b).diff(v);
        case Op::Sub: return Expr(n.a).diff(v) - Expr(n.b).diff(v);
        case Op::Mul:
            return Expr(n.a).diff(v) * Expr(n.b) + Expr(n.a) * Expr(n.b).diff(v);
        case Op::Div: {
            Expr a(n.a), b(n.b);
            return (a.diff(v) * b - a * b.diff(v)) / (b * b);
        }
        case Op::Neg: return -Expr(n.a).diff(v);
        case Op::Pow: {
            Expr base(n.a);
            return constant(static_cast<double>(n.exponent)) *
                   Expr::pow(base, n.exponent - 1) * base.diff(v);
        }
        case Op::Call: {
            Expr a(n.a);
            Expr da = a.diff(v);
            if (n.name == "sin") return call("cos", a) * da;
            if (n.name == "cos") return -(call("sin", a) * da);
            if (n.name == "exp") return call("exp", a) * da;
            if (n.name == "tanh") {
                Expr t = call("tanh", a);
                return (constant(1.0) - t * t) * da;
            }
            throw Error(ErrorKind::Internal, "unreachable function");
        }
    }
    throw Error(ErrorKind::Internal, "unreachable expression op");
}

Expr Expr::substitute(const std::map<std::string, Expr>& bindings) const {
    const Node& n = *node_;
    switch (n.op) {
        case Op::Const: return *this;
        case Op::Var: {
            auto it = bindings.find(n.name);
            return it == bindings.end() ? *this : it->second;
        }
        case Op::Add: return Expr(n.a).substitute(bindings) + Expr(n.b).substitute(bindings);
        case Op::Sub: return Expr(n.a).substitute(bindings) - Expr(n.b).substitute(bindings);
        case Op::Mul: return Expr(n.a).substitute(bindings) * Expr(n.b).substitute(bindings);
        case Op::Div: return Expr(n.a).substitute(bindings) / Expr(n.b).substitute(bindings);
        case Op::Neg: return -Expr(n.a).substitute(bindings);
        case Op::Pow: return Expr::pow(Expr(n.a).substitute(bindings), n.exponent);
        case Op::Call: return call(n.name, Expr(n.a).substitute(bindings));
    }
    throw Error(ErrorKind::Internal, "unreachable expression op");
}

void Expr::collect_variables(std::set<std::string>& out) const {
    const Node& n = *node_;
    if (n.op == Op::Var) out.insert(n.name);
    if (n.a) Expr(n.a).collect_variables(out);
    if (n.b) Expr(n.b).collect_variables(out);
}

std::set<std::string> Expr::variables() const {
    std::set<std::string> out;
    collect_variables(out);
    return out;
}

bool Expr::is_constant() const { return node_->op == Op::Const; }
double Expr::constant_value() const { return node_->value; }

namespace {

void print_node(const Expr::Node& n, std::ostream& os, int parent_prec) {
    int prec = precedence(n.op);
    bool parens = prec < parent_prec;
    if (parens) os << "(";
    switch (n.op) {
        case Op::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            if (n.value < 0 && parent_prec > 0)
                os << "(" << tmp.str() << ")";
            else
                os << tmp.str();
            break;
        }
        case Op::Var: os << n.name; break;
        case Op::Add:
            print_node(*n.a, os, prec);
            os << " + ";
            print_node(*n.b, os, prec + 1);
            break;
        case Op::Sub:
            print_node(*n.a, os, prec);
            os << " - ";
            print_node(*n.b, os, prec + 1);
            break;
        case Op::Mul:
            print_node(*n.a, os, prec);
            os << "*";
            print_node(*n.b, os, prec + 1);
            break;
        case Op::Div:
            print_node(*n.a, os, prec);
            os << "/";
            print_node(*n.b, os, prec + 1);
            break;
        case Op::Neg:
            os << "-";
            print_node(*n.a, os, prec + 1);
            break;
        case Op::Pow:
            print_node(*n.a, os, prec + 1);
            os << "^" << n.exponent;
            break;
        case Op::Call:
            os << n.name << "(";
            print_node(*n.a, os, 0);
            os << ")";
            break;
    }
    if (parens) os << ")";
}

}  // namespace

std::string Expr::to_string() const {
    std::ostringstream os;
    print_node(*node_, os, 0);
    return os.str();
}

bool Expr::structurally_equal(const Expr& other) const {
    const Node& x = *node_;
    const Node& y = *other.node_;
    if (x.op != y.op) return false;
    switch (x.op) {
        case Op::Const: return x.value == y.value;
        case Op::Var: return x.name == y.name;
        case Op::Call:
            return x.name == y.name && Expr(x.a).structurally_equal(Expr(y.a));
        case Op::Pow:
            return x.exponent == y.exponent && Expr(x.a).structurally_equal(Expr(y.a));
        case Op::Neg: return Expr(x.a).structurally_equal(Expr(y.a));
        default:
            return Expr(x.a).structurally_equal(Expr(y.a)) &&
                   Expr(x.b).structurally_equal(Expr(y.b));
    }
}

namespace {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    Expr parse() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::ParseError,
                    msg + " at " + std::to_string(line) + ":" + std::to_string(col));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Expr parse_sum() {
        Expr e = parse_term();
        while (true) {
            if (eat('+'))
                e = e + parse_term();
            else if (eat('-'))
                e = e - parse_term();
            else
                return e;
        }
    }

    Expr parse_term() {
        Expr e = parse_unary();
        while (true) {
            if (eat('*'))
                e = e * parse_unary();
            else if (eat('/'))
                e = e / parse_unary();
            else
                return e;
        }
    }

    Expr parse_unary() {
        if (eat('-')) return -parse_unary();
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (eat('^')) {
            skip_ws();
            bool negative = eat('-');
            skip_ws();
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                fail("expected integer exponent");
            long long exp = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                exp = exp * 10 + (text_[pos_++] - '0');
            return Expr::pow(base, negative ? -exp : exp);
        }
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (peek() == '(') {
                if (!known_functions().count(name)) {
                    pos_ = start;
                    fail("unknown function '" + name + "'");
                }
                eat('(');
                Expr arg = parse_sum();
                if (!eat(')')) fail("expected ')'");
                return Expr::call(name, arg);
            }
            return Expr::var(std::move(name));
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;
            }
        }
        std::string token(text_.substr(start, pos_ - start));
        try {
            return Expr::constant(std::stod(token));
        } catch (const std::exception&) {
            pos_ = start;
            fail("malformed number '" + token + "'");
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return ExprParser(text).parse(); }

}  // namespace wirecalc
