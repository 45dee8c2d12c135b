#include "clausen/expr.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace clausen;

namespace {

long digits_between(const Complex& a, const Complex& b) {
    Real d = abs(a - b);
    if (d.is_zero()) return 1000;
    Real sc = abs(a);
    if (abs(b) > sc) sc = abs(b);
    if (sc < Real(1, sc.prec())) sc = Real(1, sc.prec());
    return -exponent10(d / sc);
}

} // namespace

TEST_CASE("parsing the grammar") {
    auto e = parse("pochhammer(1/2,n) * 4^n / (fact(2*n) * (n+1))");
    REQUIRE(e->kind == ExprKind::div);
    // the literal 1/2 folds to a single exact rational
    const Expr& poch = *e->args[0]->args[0];
    REQUIRE(poch.kind == ExprKind::call);
    CHECK(poch.args[0]->kind == ExprKind::number);
    CHECK(poch.args[0]->number == Rat(1, 2));

    CHECK_NOTHROW(parse("3*sqrt(3)*(3-ln(4))/(2*pi)"));

    try {
        parse("2^^3");
        FAIL("expected parse error");
    } catch (const parse_error& err) {
        CHECK(err.offset == 2);
    }
    CHECK_THROWS_AS(parse("frobnicate(3)"), parse_error);
    CHECK_THROWS_AS(parse("sin(1, 2)"), parse_error);
    CHECK_THROWS_AS(parse("1 + "), parse_error);
}

TEST_CASE("free variables") {
    CHECK(free_vars(parse("x^(2*n+3)")) == std::set<std::string>{"x", "n"});
    CHECK(free_vars(parse("pi")).empty());
    CHECK(free_vars(parse("lerch(f*(1-x^a)^b, -d, 1+g)")) ==
          std::set<std::string>({"f", "x", "a", "b", "d", "g"}));
}

TEST_CASE("round trip parse(print(e)) == e") {
    std::vector<std::string> cases = {
        "pochhammer(1/2,n)*4^n/(fact(2*n)*(n+1))",
        "-(2/3)*(1-x)^(3/2) + 2/3",
        "x^(-1/2)",
        "(-1)^(1/8)*2^(1/4)",
        "a - (b - c)*d/(e/f)",
        "2^3^2",
        "-x^2 + (-x)^2",
        "1.25*x - 0.5",
        "csc(x)*sin((1-2*k/m)*x)/(1-2*k/m)",
    };
    for (const auto& s : cases) {
        auto e = parse(s);
        auto e2 = parse(print(e));
        INFO(s << "  ->  " << print(e));
        CHECK(expr_equal(e, e2));
    }
}

TEST_CASE("round trip over random expressions") {
    std::mt19937 rng(4242);
    std::function<ExprPtr(int)> gen = [&](int depth) -> ExprPtr {
        int pick = (int)(rng() % (depth <= 0 ? 3u : 8u));
        switch (pick) {
            case 0: return Expr::make_number(Rat((long)(rng() % 19) - 9, 1 + (long)(rng() % 7)));
            case 1: return Expr::make_name(ExprKind::variable, rng() % 2 ? "x" : "n");
            case 2: return Expr::make_name(ExprKind::constant, rng() % 2 ? "pi" : "catalan");
            case 3: return Expr::make_op(ExprKind::add, {gen(depth - 1), gen(depth - 1)});
            case 4: return Expr::make_op(ExprKind::sub, {gen(depth - 1), gen(depth - 1)});
            case 5: return Expr::make_op(ExprKind::mul, {gen(depth - 1), gen(depth - 1)});
            case 6: return Expr::make_op(ExprKind::div, {gen(depth - 1), gen(depth - 1)});
            default:
                if (rng() % 2) return Expr::make_op(ExprKind::neg, {gen(depth - 1)});
                return Expr::make_op(ExprKind::pow, {gen(depth - 1), gen(depth - 1)});
        }
    };
    for (int it = 0; it < 500; ++it) {
        ExprPtr e = gen(4);
        std::string s = print(e);
        INFO(s);
        ExprPtr e2;
        REQUIRE_NOTHROW(e2 = parse(s));
        CHECK(expr_equal(e, e2));
    }
}

TEST_CASE("evaluation: exact combinatorics") {
    EvalContext ctx = ctx_new(40);
    Bindings b;
    CHECK(digits_between(eval(parse("pochhammer(1/2,3)"), b, ctx),
                         Complex(Rat(15, 8), ctx.prec())) >= 40);
    CHECK(digits_between(eval(parse("dfact(7)"), b, ctx), Complex(105, ctx.prec())) >= 40);
    CHECK(digits_between(eval(parse("dfact(-1)"), b, ctx), Complex(1, ctx.prec())) >= 40);
    CHECK(digits_between(eval(parse("binom(9,4)"), b, ctx), Complex(126, ctx.prec())) >= 40);
    CHECK(digits_between(eval(parse("harmonic(4)"), b, ctx),
                         Complex(Rat(25, 12), ctx.prec())) >= 40);
    CHECK(digits_between(eval(parse("altharmonic(3)"), b, ctx),
                         Complex(Rat(5, 6), ctx.prec())) >= 40);
    CHECK_THROWS_AS(eval(parse("fact(-2)"), b, ctx), domain_error);
    CHECK_THROWS_AS(eval(parse("fact(1/2)"), b, ctx), domain_error);

    // zero rounding error before the final embedding: a big exact value
    auto big = detail::try_exact(*parse("binom(40,20)*fact(12)/dfact(9)"), b);
    REQUIRE(big.has_value());
    CHECK(big->is_integer());
}

TEST_CASE("evaluation against a partial-sum oracle") {
    EvalContext ctx = ctx_new(40);
    Bindings b;
    // (2 pi^2 - 19)/8 equals sum 1/(n^2 (n+1)^2 (n+2)); partial sums to 10^5
    // with an integral tail bound bracket the value
    Complex v = eval(parse("(2*pi^2-19)/8"), b, ctx);
    mpfr_prec_t p = ctx.prec();
    Complex acc(0, p);
    long N = 100000;
    for (long n = 1; n <= N; ++n) {
        Real nn(n, p);
        acc += Complex(Real(1, p) / (nn * nn * (nn + Real(1, p)) * (nn + Real(1, p)) *
                                     (nn + Real(2, p))));
    }
    Real tail_hi = Real(1, p) / (Real(4, p) * pow_si(Real(N, p), 4));
    Real diff = abs(v - acc);
    CHECK(diff < tail_hi);
    CHECK(digits_between(v, Complex(Real("0.0924011002723396547086227499690377838284248518", p))) >= 40);
}

TEST_CASE("unbound variable and domain errors propagate") {
    EvalContext ctx = ctx_new(40);
    Bindings b;
    CHECK_THROWS_AS(eval(parse("x + 1"), b, ctx), domain_error);
    CHECK_THROWS_AS(eval(parse("ln(0)"), b, ctx), domain_error);
    CHECK_THROWS_AS(eval(parse("1/0"), b, ctx), domain_error);
    CHECK_THROWS_AS(eval(parse("gamma(-2)"), b, ctx), domain_error);
}

TEST_CASE("evaluation homomorphism over random operands") {
    EvalContext ctx = ctx_new(40);
    std::mt19937 rng(11);
    std::vector<std::string> pool = {
        "3/7", "pi", "sin(2)", "ln(5)", "sqrt(2)", "gamma(1/3)", "1.5", "catalan",
        "2^(1/4)", "atan(3)",
    };
    Bindings b;
    for (int it = 0; it < 60; ++it) {
        std::string A = pool[rng() % pool.size()];
        std::string B = pool[rng() % pool.size()];
        Complex lhs = eval(parse(A + " + " + B), b, ctx);
        Complex rhs = eval(parse(A), b, ctx) + eval(parse(B), b, ctx);
        CHECK(digits_between(lhs, rhs) >= 40);
        Complex lhm = eval(parse("(" + A + ") * (" + B + ")"), b, ctx);
        Complex rhm = eval(parse(A), b, ctx) * eval(parse(B), b, ctx);
        CHECK(digits_between(lhm, rhm) >= 40);
    }
}

TEST_CASE("determinism: identical input gives bit-identical output") {
    EvalContext ctx = ctx_new(40);
    Bindings b;
    b.set_exact("x", Rat(3, 7), ctx);
    auto e = parse("sin(x)^2 + gamma(x)*polylog(2, x)");
    Complex v1 = eval(e, b, ctx);
    Complex v2 = eval(parse("sin(x)^2 + gamma(x)*polylog(2, x)"), b, ctx);
    CHECK(mpfr_equal_p(v1.re().raw(), v2.re().raw()));
    CHECK(mpfr_equal_p(v1.im().raw(), v2.im().raw()));
}

TEST_CASE("integer powers of negative bases stay exact") {
    EvalContext ctx = ctx_new(40);
    Bindings b;
    b.set_exact("n", Rat(7), ctx);
    Complex v = eval(parse("(-1)^n"), b, ctx);
    CHECK(v.re() == Real(-1, ctx.prec()));
    CHECK(v.im().is_zero());
}
