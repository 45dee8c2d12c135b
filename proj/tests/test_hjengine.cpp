#include "clausen/transform.hpp"

#include <catch2/catch_amalgamated.hpp>

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

TEST_CASE("pattern extraction") {
    TermPattern p1 = pattern_of(parse("c^n * x^(2*n+3)"));
    CHECK(p1.xpow == LinForm{Rat(2), Rat(3)});
    CHECK(p1.factors.empty());

    TermPattern p2 = pattern_of(parse("(1-x^4)^(2*n)/c^n"));
    REQUIRE(p2.factors.size() == 1);
    CHECK(p2.factors[0].base_exponent == 4);
    CHECK(p2.factors[0].outer == LinForm{Rat(2), Rat(0)});
    CHECK(p2.xpow.is_zero());

    CHECK_THROWS_AS(pattern_of(parse("sin(x)^n")), domain_error);

    // reconstruction equals the flat term at random samples
    EvalContext ctx = ctx_new(30);
    auto flat = parse("pochhammer(1/2,n)*4^n*x^(2*n+3)*(1-x^2)^(n+1)/(fact(2*n)*(n+1))");
    TermPattern pat = pattern_of(flat);
    ExprPtr rebuilt = pattern_expr(pat);
    for (long n = 0; n <= 6; ++n) {
        Bindings b;
        b.set_exact("n", Rat(n), ctx);
        b.set_exact("x", Rat(2, 7), ctx);
        CHECK(digits_between(eval(flat, b, ctx), eval(rebuilt, b, ctx)) >= 28);
    }
}

TEST_CASE("rule application formulas") {
    EvalContext ctx = ctx_new(40);

    SECTION("wallis") {
        TermPattern p = pattern_of(parse("x^(2*n)"));
        TermPattern r = apply_rule(p, TransformRule{RuleKind::wallis});
        CHECK(r.xpow.is_zero());
        Bindings b;
        b.set_exact("n", Rat(4), ctx);
        Complex got = eval(r.coeff, b, ctx);
        Complex expect = eval(parse("(pi/2)*pochhammer(1/2,4)/fact(4)"), b, ctx);
        CHECK(digits_between(got, expect) >= 38);
        CHECK_THROWS_AS(apply_rule(pattern_of(parse("x^(2*n+1)")), TransformRule{RuleKind::wallis}),
                        domain_error);
        CHECK_THROWS_AS(apply_rule(pattern_of(parse("x^(2*n)*(1-x^2)^(n+1/2)")),
                                   TransformRule{RuleKind::wallis}),
                        domain_error);
    }

    SECTION("integrate_0x") {
        TermPattern p = pattern_of(parse("x^(n+1)"));
        TermPattern r = apply_rule(p, TransformRule{RuleKind::integrate_0x});
        CHECK(r.xpow == LinForm{Rat(1), Rat(2)});
        Bindings b;
        b.set_exact("n", Rat(3), ctx);
        CHECK(digits_between(eval(r.coeff, b, ctx), Complex(Rat(1, 5), ctx.prec())) >= 38);
    }

    SECTION("multiply_xpow and substitute_x_sq") {
        TermPattern p = pattern_of(parse("x^n*(1-x^2)^n"));
        TermPattern r = apply_rule(p, TransformRule{RuleKind::multiply_xpow, 3});
        CHECK(r.xpow == LinForm{Rat(1), Rat(3)});
        TermPattern s = apply_rule(r, TransformRule{RuleKind::substitute_x_sq});
        CHECK(s.xpow == LinForm{Rat(2), Rat(6)});
        CHECK(s.factors[0].base_exponent == 4);
    }

    SECTION("beta_01 on x^{2n} (1-x^2)^n") {
        TermPattern p = pattern_of(parse("x^(2*n)*(1-x^2)^n"));
        TermPattern r = apply_rule(p, TransformRule{RuleKind::beta_01});
        CHECK(r.xpow.is_zero());
        CHECK(r.factors.empty());
        // gamma form must equal 4^n/((2n+1) C(4n+1,2n)) exactly for n = 0..20
        for (long n = 0; n <= 20; ++n) {
            Bindings b;
            b.set_exact("n", Rat(n), ctx);
            Complex got = eval(r.coeff, b, ctx);
            Complex expect = eval(parse("4^n/((2*n+1)*binom(4*n+1,2*n))"), b, ctx);
            CHECK(digits_between(got, expect) >= 38);
        }
    }

    SECTION("x_sin_pi") {
        TermPattern p = pattern_of(parse("x^n"));
        TermPattern r = apply_rule(p, TransformRule{RuleKind::x_sin_pi});
        Bindings b;
        b.set_exact("n", Rat(5), ctx);
        Complex got = eval(r.coeff, b, ctx);
        Complex expect = eval(parse("pi^(3/2)*gamma(3)/(2*gamma(7/2))"), b, ctx);
        CHECK(digits_between(got, expect) >= 38);
    }
}

TEST_CASE("rule factors agree with direct quadrature for n = 0..8") {
    EvalContext ctx = ctx_new(30);
    Bindings empty;
    TermPattern xp2n = pattern_of(parse("x^(2*n)"));
    TermPattern wr = apply_rule(xp2n, TransformRule{RuleKind::wallis});
    TermPattern br = apply_rule(pattern_of(parse("x^(2*n)*(1-x^2)^n")),
                                TransformRule{RuleKind::beta_01});
    TermPattern sr = apply_rule(pattern_of(parse("x^n")), TransformRule{RuleKind::x_sin_pi});
    for (long n = 0; n <= 8; n += 2) {
        Bindings b;
        b.set_exact("n", Rat(n), ctx);
        QuadResult w = integrate(parse("sin(t)^(2*n)"), "t", parse("0"), parse("pi/2"), b, ctx);
        CHECK(digits_between(w.value, eval(wr.coeff, b, ctx)) >= 25);
        QuadResult bq = integrate(parse("x^(2*n)*(1-x^2)^n"), "x", parse("0"), parse("1"), b, ctx);
        CHECK(digits_between(bq.value, eval(br.coeff, b, ctx)) >= 25);
        QuadResult s = integrate(parse("x*sin(x)^n"), "x", parse("0"), parse("pi"), b, ctx);
        CHECK(digits_between(s.value, eval(sr.coeff, b, ctx)) >= 25);
    }
}

TEST_CASE("chains reproduce the hand-entered series") {
    EvalContext ctx = ctx_new(60);
    SeriesSpec seed{0, parse("pochhammer(1/2,n)*pochhammer(-1/2,n)*4^n/fact(2*n) * x^n"), "n"};

    SECTION("seed -> eq 2/3") {
        SeriesSpec derived = derive_chain(seed, {TransformRule{RuleKind::integrate_0x}});
        SeriesSpec stated{0, parse("pochhammer(1/2,n)*pochhammer(-1/2,n)*4^n*x^(n+1)/"
                                   "(fact(2*n)*(n+1))"), "n"};
        std::vector<Bindings> samples;
        for (const char* xs : {"1/4", "1/2", "3/4"}) {
            Bindings b;
            b.set_exact("x", detail::try_exact(*parse(xs), {}).value(), ctx);
            samples.push_back(b);
        }
        Real dev = compare_termwise(derived, stated, 0, 50, samples, ctx);
        CHECK(dev < pow_si(Real(10, ctx.prec()), -50));
    }

    SECTION("eq 5/8 -> eq 144 series") {
        SeriesSpec eq58{0, parse("pochhammer(1/2,n)*pochhammer(-1/2,n)*4^n*x^(2*n+3)/"
                                 "(fact(2*n)*(n+1)*(2*n+3))"), "n"};
        SeriesSpec derived = derive_chain(eq58, {TransformRule{RuleKind::multiply_xpow, 1},
                                                 TransformRule{RuleKind::integrate_0x}});
        SeriesSpec stated{0, parse("pochhammer(1/2,n)*pochhammer(-1/2,n)*4^n*x^(2*n+5)/"
                                   "(fact(2*n)*(n+1)*(2*n+3)*(2*n+5))"), "n"};
        Bindings b;
        b.set_exact("x", Rat(1, 2), ctx);
        Real dev = compare_termwise(derived, stated, 0, 50, {b}, ctx);
        CHECK(dev < pow_si(Real(10, ctx.prec()), -50));
    }

    SECTION("failing step is reported with its index") {
        SeriesSpec bad{0, parse("x^(2*n)*(1-x^2)^(n+1/2)"), "n"};
        try {
            derive_chain(bad, {TransformRule{RuleKind::substitute_x_sq},
                               TransformRule{RuleKind::wallis}});
            FAIL("expected chain failure");
        } catch (const domain_error& e) {
            CHECK(std::string(e.what()).find("step 2") != std::string::npos);
        }
    }

    SECTION("composition outside the pattern language errors") {
        CHECK_THROWS_AS(pattern_of(parse("(1-sin(x)^4)^(3/2)")), domain_error);
    }
}

TEST_CASE("termwise comparison detects perturbations") {
    EvalContext ctx = ctx_new(40);
    SeriesSpec a{0, parse("x^n/(n+1)"), "n"};
    SeriesSpec same{0, parse("x^n/(n+1)"), "n"};
    SeriesSpec off{0, parse("x^n/(n+2)"), "n"};
    Bindings b;
    b.set_exact("x", Rat(1, 3), ctx);
    CHECK(compare_termwise(a, same, 0, 50, {b}, ctx).is_zero());
    Real dev = compare_termwise(a, off, 0, 50, {b}, ctx);
    CHECK(dev >= Real(Rat(1, 100), ctx.prec()));
}

TEST_CASE("exactness across a ten-step chain") {
    SeriesSpec seed{0, parse("x^(2*n)"), "n"};
    std::vector<TransformRule> chain;
    for (int i = 0; i < 5; ++i) {
        chain.push_back(TransformRule{RuleKind::multiply_xpow, 1});
        chain.push_back(TransformRule{RuleKind::integrate_0x});
    }
    SeriesSpec out = derive_chain(seed, chain);
    TermPattern pat = pattern_of(out.term);
    CHECK(pat.xpow == LinForm{Rat(2), Rat(10)});
}
