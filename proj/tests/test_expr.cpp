#include "ghe/expr.hpp"
#include "ghe/fd_oracle.hpp"
#include "ghe/smooth_fn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ghe;

namespace {

double at(const Expr& e, double a) { return e.evaluate(std::vector<double>{a}); }
double at(const Expr& e, double a, double b) { return e.evaluate(std::vector<double>{a, b}); }

}  // namespace

TEST(Parse, QuotientOfPowerHasExpectedTree)
{
    const Expr e = parse("p^2/2", {"p"});
    const Node& root = e.root();
    ASSERT_EQ(root.kind, NodeKind::div);
    ASSERT_EQ(root.lhs->kind, NodeKind::pow);
    EXPECT_EQ(root.lhs->lhs->kind, NodeKind::variable);
    EXPECT_EQ(root.lhs->rhs->kind, NodeKind::constant);
    EXPECT_EQ(root.lhs->rhs->value, 2.0);
    ASSERT_EQ(root.rhs->kind, NodeKind::constant);
    EXPECT_EQ(root.rhs->value, 2.0);
}

TEST(Parse, TwoVariableExpression)
{
    const Expr e = parse("p*y + sin(y)", {"p", "y"});
    EXPECT_EQ(e.variables().size(), 2u);
    EXPECT_DOUBLE_EQ(at(e, 2.0, 0.5), 1.0 + std::sin(0.5));
}

TEST(Parse, SyntaxErrorReportsOffset)
{
    try {
        parse("p +* 2", {"p"});
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::syntax);
        EXPECT_EQ(e.offset(), 3u);
    }
}

TEST(Parse, UnknownIdentifierAndFunction)
{
    try {
        parse("p + y", {"p"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::unknown_identifier);
        EXPECT_EQ(e.offset(), 4u);
    }
    try {
        parse("abs(p)", {"p"});
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.kind(), ParseError::Kind::unknown_function);
        EXPECT_EQ(e.offset(), 0u);
    }
}

TEST(Parse, RejectsEmptyAndTruncatedInput)
{
    EXPECT_THROW(parse("", {"p"}), ParseError);
    EXPECT_THROW(parse("   ", {"p"}), ParseError);
    EXPECT_THROW(parse("(p + 1", {"p"}), ParseError);
    EXPECT_THROW(parse("p 2", {"p"}), ParseError);
    EXPECT_THROW(parse("sin p", {"p"}), ParseError);
}

TEST(Parse, VariableDeclarations)
{
    EXPECT_THROW(parse("1", std::vector<std::string>{}), std::invalid_argument);
    EXPECT_THROW(parse("p", {"p", "p"}), std::invalid_argument);
    EXPECT_THROW(parse("p", {"p", "y", "z"}), std::invalid_argument);
    EXPECT_THROW(parse("sin", {"sin"}), std::invalid_argument);
}

TEST(Parse, PowerBindsTighterThanUnaryMinus)
{
    EXPECT_EQ(at(parse("-p^2", {"p"}), 3.0), -9.0);
    EXPECT_EQ(at(parse("2^-1", {"p"}), 0.0), 0.5);
    EXPECT_EQ(at(parse("2^3^2", {"p"}), 0.0), 512.0);
    EXPECT_EQ(at(parse("p^0.5", {"p"}), 4.0), 2.0);
    EXPECT_EQ(at(parse("1.5e1 - 2*3", {"p"}), 0.0), 9.0);
}

TEST(Differentiate, Examples)
{
    const Expr d1 = differentiate(parse("p^2/2", {"p"}), "p");
    for (double p : {-2.0, 0.0, 0.3, 5.0}) EXPECT_DOUBLE_EQ(at(d1, p), p);

    const Expr d2 = differentiate(parse("p*y + sin(y)", {"p", "y"}), "y");
    EXPECT_DOUBLE_EQ(at(d2, 1.5, 0.2), 1.5 + std::cos(0.2));

    const Expr d3 = differentiate(parse("7.25", {"p"}), "p");
    EXPECT_TRUE(d3.is_constant());
    EXPECT_EQ(d3.root().value, 0.0);

    EXPECT_EQ(differentiate(d1, "p").variables(), d1.variables());
    EXPECT_THROW(differentiate(d1, "y"), std::invalid_argument);
}

TEST(Differentiate, ElementaryFunctions)
{
    const VariableSet v({"p"});
    struct Case {
        const char* f;
        double (*df)(double);
    };
    const Case cases[] = {
        {"sin(p)", [](double p) { return std::cos(p); }},
        {"cos(p)", [](double p) { return -std::sin(p); }},
        {"exp(p)", [](double p) { return std::exp(p); }},
        {"log(p)", [](double p) { return 1.0 / p; }},
        {"sqrt(p)", [](double p) { return 0.5 / std::sqrt(p); }},
        {"tanh(p)", [](double p) { return 1.0 - std::tanh(p) * std::tanh(p); }},
        {"p^p", [](double p) { return std::pow(p, p) * (std::log(p) + 1.0); }},
        {"1/p", [](double p) { return -1.0 / (p * p); }},
    };
    for (const auto& c : cases) {
        const Expr d = differentiate(parse(c.f, v), 0);
        for (double p : {0.3, 1.0, 2.7}) EXPECT_NEAR(at(d, p), c.df(p), 1e-13 * (1 + std::abs(c.df(p)))) << c.f;
    }
}

TEST(Evaluate, Examples)
{
    EXPECT_EQ(evaluate(parse("p^2/2", {"p"}), {{"p", 3.0}}), 4.5);
    EXPECT_EQ(evaluate(parse("exp(p)", {"p"}), {{"p", 0.0}}), 1.0);
    EXPECT_THROW(evaluate(parse("p", {"p"}), {}), std::invalid_argument);
}

TEST(Evaluate, DomainErrorsNameTheSubexpression)
{
    const auto expect_domain = [](const char* src, double p, const std::string& sub) {
        try {
            evaluate(parse(src, {"p"}), {{"p", p}});
            FAIL() << src;
        } catch (const DomainError& e) {
            EXPECT_EQ(e.subexpression(), sub) << src;
        }
    };
    expect_domain("1/p", 0.0, "(1/p)");
    expect_domain("2 + log(p)", -1.0, "log(p)");
    expect_domain("sqrt(p - 1)", 0.0, "sqrt((p - 1))");
}

TEST(Print, CanonicalFormIsFullyParenthesised)
{
    EXPECT_EQ(parse("p^2/2", {"p"}).to_string(), "((p^2)/2)");
    EXPECT_EQ(parse("-p^2", {"p"}).to_string(), "(-(p^2))");
}

TEST(SmoothFn, CachedPartialsMatchFreshDifferentiation)
{
    const SmoothFn f = SmoothFn::parse("sin(p*y) + p^3*exp(y/3)", {"p", "y"});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i <= 3; ++i) {
        for (int j = 0; i + j <= 3; ++j) {
            Expr fresh = f.expr();
            for (int k = 0; k < i; ++k) fresh = differentiate(fresh, 0);
            for (int k = 0; k < j; ++k) fresh = differentiate(fresh, 1);
            for (int trial = 0; trial < 20; ++trial) {
                const double a = u(rng), b = u(rng);
                const double want = at(fresh, a, b);
                EXPECT_NEAR(f.d(i, j, a, b), want, 1e-12 * (1 + std::abs(want)));
            }
        }
    }
    // Order 4 is not cached but still available.
    EXPECT_NEAR(at(f.partial(4, 0), 0.5, 0.5), std::pow(0.5, 4) * std::sin(0.25), 1e-12);
}

TEST(SmoothFn, UnaryRejectsSecondVariablePartials)
{
    const SmoothFn f = SmoothFn::parse("p^2", {"p"});
    EXPECT_EQ(f.arity(), 1);
    EXPECT_THROW(f.partial(0, 1), std::invalid_argument);
}

// ------------------------------------------------------------ properties

namespace {

// Random expressions over (p, y) that stay finite on [-1, 1]^2.
class ExprGen {
public:
    explicit ExprGen(std::uint64_t seed) : rng_(seed) {}

    std::string gen(int depth)
    {
        if (depth == 0 || pick(10) < 2) return leaf();
        const std::string a = gen(depth - 1);
        switch (pick(14)) {
        case 0: return "(" + a + " + " + gen(depth - 1) + ")";
        case 1: return "(" + a + " - " + gen(depth - 1) + ")";
        case 2:
        case 3: return "(" + a + " * " + gen(depth - 1) + ")";
        case 4: return "(" + a + " / (1.5 + cos(" + gen(depth - 1) + ")))";
        case 5: return "(" + a + ")^2";
        case 6: return "(" + a + ")^3";
        case 7: return "sin(" + a + ")";
        case 8: return "cos(" + a + ")";
        case 9: return "tanh(" + a + ")";
        case 10: return "exp(tanh(" + a + "))";
        case 11: return "log(1 + (" + a + ")^2)";
        case 12: return "sqrt(2 + sin(" + a + "))";
        default: return "-(" + a + ")";
        }
    }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    std::string leaf()
    {
        switch (pick(3)) {
        case 0: return "p";
        case 1: return "y";
        default: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", uniform(-2.0, 2.0));
            return std::string("(") + buf + ")";
        }
        }
    }

    std::mt19937_64 rng_;
};

}  // namespace

TEST(ExprProperty, SymbolicDerivativeMatchesRichardsonDifference)
{
    ExprGen gen(2024);
    const VariableSet vars({"p", "y"});
    int accepted = 0;
    int rejected = 0;
    while (accepted < 1000) {
        const std::string src = gen.gen(6);
        const Expr e = parse(src, vars);
        const int var = accepted % 2;
        const Expr d = differentiate(e, var);
        const double p = gen.uniform(-1.0, 1.0), y = gen.uniform(-1.0, 1.0);
        const double value = at(e, p, y);
        // Keep rounding in the stencil (~eps |f| / h) well under the tolerance.
        if (!(std::abs(value) <= 100.0)) {
            ++rejected;
            continue;
        }
        const double exact = at(d, p, y);
        const double fd = fd_derivative(
            [&](double c) { return var == 0 ? at(e, c, y) : at(e, p, c); }, var == 0 ? p : y, 1e-5);
        ASSERT_LE(std::abs(exact - fd), 1e-6 * (1.0 + std::abs(exact))) << src;
        ++accepted;
    }
    EXPECT_LT(rejected, 1000);
}

TEST(ExprProperty, PrintParseRoundTripIsExact)
{
    ExprGen gen(77);
    const VariableSet vars({"p", "y"});
    for (int i = 0; i < 500; ++i) {
        const Expr e = parse(gen.gen(6), vars);
        const Expr again = parse(e.to_string(), vars);
        EXPECT_EQ(again.to_string(), e.to_string());
        for (int k = 0; k < 5; ++k) {
            const double p = gen.uniform(-1.0, 1.0), y = gen.uniform(-1.0, 1.0);
            const double a = at(e, p, y), b = at(again, p, y);
            EXPECT_TRUE(a == b || (std::isnan(a) && std::isnan(b))) << e.to_string();
        }
    }
}

TEST(ExprProperty, DifferentiationIsLinear)
{
    ExprGen gen(31);
    const VariableSet vars({"p", "y"});
    for (int i = 0; i < 300; ++i) {
        const Expr e1 = parse(gen.gen(4), vars);
        const Expr e2 = parse(gen.gen(4), vars);
        const double a = gen.uniform(-3.0, 3.0), b = gen.uniform(-3.0, 3.0);
        const Expr lhs = differentiate(Expr::constant(a, vars) * e1 + Expr::constant(b, vars) * e2, 0);
        const Expr d1 = differentiate(e1, 0), d2 = differentiate(e2, 0);
        for (int k = 0; k < 5; ++k) {
            const double p = gen.uniform(-1.0, 1.0), y = gen.uniform(-1.0, 1.0);
            const double want = a * at(d1, p, y) + b * at(d2, p, y);
            EXPECT_NEAR(at(lhs, p, y), want, 1e-12 * (1.0 + std::abs(want)));
        }
    }
}

TEST(Program, MatchesTreeEvaluation)
{
    ExprGen gen(9);
    const VariableSet vars({"p", "y"});
    for (int i = 0; i < 200; ++i) {
        const Expr e = parse(gen.gen(5), vars);
        const Program prog(e);
        const double p = gen.uniform(-1.0, 1.0), y = gen.uniform(-1.0, 1.0);
        const double a = at(e, p, y), b = prog(p, y);
        EXPECT_TRUE(a == b || (std::isnan(a) && std::isnan(b)));
    }
    const Program inv(parse("1/p", {"p"}));
    EXPECT_TRUE(std::isinf(inv(0.0)));
    const double zero[1] = {0.0};
    EXPECT_THROW(inv.checked(zero), DomainError);
}
