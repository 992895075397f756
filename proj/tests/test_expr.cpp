#include <doctest.h>

#include <cmath>

#include "wirecalc/expr.hpp"
#include "wirecalc/harness.hpp"

using namespace wirecalc;

TEST_CASE("parsing and evaluation of the running example") {
    Expr e = parse_expr("2*x - 3*b1 + a");
    CHECK(e.eval({{"x", 1.0}, {"b1", 1.0}, {"a", 1.0}}) == 0.0);
    CHECK(e.variables() == std::set<std::string>{"x", "b1", "a"});
}

TEST_CASE("precedence") {
    Expr e = parse_expr("-x + a");
    Expr expected = (-Expr::var("x")) + Expr::var("a");
    CHECK(e.structurally_equal(expected));
    CHECK(parse_expr("-x^2").eval({{"x", 2.0}}) == -4.0);  // power binds tighter than minus
    CHECK(parse_expr("2*x - 3/x").eval({{"x", 1.0}}) == -1.0);
    CHECK(parse_expr("2 - 3 - 4").eval({}) == -5.0);  // left associative
    CHECK(parse_expr("8/4/2").eval({}) == 1.0);
}

TEST_CASE("function evaluation") {
    CHECK(parse_expr("sin(x^2)").eval({{"x", 0.0}}) == 0.0);
    CHECK(parse_expr("exp(0)").eval({}) == 1.0);
    CHECK(parse_expr("3.5").eval({}) == 3.5);
    CHECK(parse_expr("tanh(0)").eval({}) == 0.0);
}

TEST_CASE("parse errors carry a position") {
    try {
        parse_expr("2*x +\n* 3");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        CHECK(std::string(e.what()).find("2:1") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_expr("foo(x)"), Error);  // unknown function
    CHECK_THROWS_AS(parse_expr("x^y"), Error);     // integer exponents only
    CHECK_THROWS_AS(parse_expr("(x"), Error);
}

TEST_CASE("evaluation errors") {
    CHECK_THROWS_AS(parse_expr("x + y").eval({{"x", 1.0}}), Error);
    CHECK_THROWS_AS(parse_expr("1/x").eval({{"x", 0.0}}), Error);  // non-finite flagged
}

TEST_CASE("derivative goldens") {
    Expr d = parse_expr("2*x - 3*b1 + a").diff("x");
    CHECK(d.to_string() == "2");
    CHECK(parse_expr("5").diff("x").to_string() == "0");
    CHECK(parse_expr("x^2").diff("x").to_string() == "2*x");
}

TEST_CASE("derivative matches central finite differences") {
    Rng rng(61);
    std::vector<std::string> vars = {"x", "y", "z"};
    int checked = 0;
    while (checked < 100) {
        Expr e = random_expr(rng, vars, 4);
        const std::string& v = vars[rng.below(vars.size())];
        Env env;
        for (const auto& name : vars) env[name] = rng.real(-1.0, 1.0);
        double h = 1e-6;
        Env hi = env, lo = env;
        hi[v] += h;
        lo[v] -= h;
        double sym, fplus, fminus;
        try {
            sym = e.diff(v).eval(env);
            fplus = e.eval(hi);
            fminus = e.eval(lo);
        } catch (const Error&) {
            continue;  // resample expressions that leave the domain
        }
        if (!std::isfinite(sym) || std::abs(sym) > 1e6) continue;
        double fd = (fplus - fminus) / (2 * h);
        CHECK(std::abs(sym - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
        ++checked;
    }
}

TEST_CASE("diff is linear") {
    Rng rng(62);
    std::vector<std::string> vars = {"x", "y"};
    for (int t = 0; t < 50; ++t) {
        Expr e1 = random_expr(rng, vars, 3);
        Expr e2 = random_expr(rng, vars, 3);
        Env env = {{"x", rng.real(-1, 1)}, {"y", rng.real(-1, 1)}};
        try {
            double lhs = (e1 + e2).diff("x").eval(env);
            double rhs = e1.diff("x").eval(env) + e2.diff("x").eval(env);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        } catch (const Error&) {
            continue;
        }
    }
}

TEST_CASE("printing round-trips through the parser") {
    Rng rng(63);
    std::vector<std::string> vars = {"x", "y", "alpha"};
    for (int t = 0; t < 200; ++t) {
        Expr e = random_expr(rng, vars, 4);
        Expr reparsed = parse_expr(e.to_string());
        CHECK(reparsed.structurally_equal(e));
    }
    // derivatives must round-trip too (they produce negative literals)
    for (int t = 0; t < 100; ++t) {
        Expr e = random_expr(rng, vars, 3).diff("x");
        CHECK(parse_expr(e.to_string()).structurally_equal(e));
    }
}

TEST_CASE("substitution") {
    Expr e = parse_expr("2*x - 3*b1 + a");
    Expr g = e.substitute({{"b1", Expr::var("x")}});
    CHECK(g.eval({{"x", 1.0}, {"a", 0.0}}) == -1.0);
    // substituting a variable by itself returns the identical tree
    CHECK(e.substitute({{"x", Expr::var("x")}}).structurally_equal(e));
}
