// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Tolerances are fixed here, not configurable.

#include "clausen/catalog.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>

using namespace clausen;

namespace {

int g_failures = 0;

void outcome(int idx, bool pass, const std::string& what, const std::string& detail = "") {
    std::cout << "criterion " << idx << ": " << (pass ? "PASS" : "FAIL") << " - " << what;
    if (!pass && !detail.empty()) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
    if (!pass) ++g_failures;
}

long digits_between(const Complex& a, const Complex& b) {
    Real d = abs(a - b);
    if (d.is_zero()) return 1000;
    Real sc = abs(a);
    if (abs(b) > sc) sc = abs(b);
    if (sc < Real(1, sc.prec())) sc = Real(1, sc.prec());
    return -exponent10(d / sc);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// --- criterion 1: transform-rule soundness against quadrature -------------

void criterion1() {
    auto t0 = std::chrono::steady_clock::now();
    EvalContext ctx = ctx_new(60);
    long worst = 1000;
    std::string detail;
    TermPattern wallis = apply_rule(pattern_of(parse("x^(2*n)")), TransformRule{RuleKind::wallis});
    TermPattern beta = apply_rule(pattern_of(parse("x^(2*n)*(1-x^2)^n")),
                                  TransformRule{RuleKind::beta_01});
    TermPattern xsin = apply_rule(pattern_of(parse("x^n")), TransformRule{RuleKind::x_sin_pi});
    try {
        for (long n = 0; n <= 20; ++n) {
            Bindings b;
            b.set_exact("n", Rat(n), ctx);
            QuadResult w = integrate(parse("sin(t)^(2*n)"), "t", parse("0"), parse("pi/2"), b, ctx);
            worst = std::min(worst, digits_between(w.value, eval(wallis.coeff, b, ctx)));
            QuadResult bq = integrate(parse("x^(2*n)*(1-x^2)^n"), "x", parse("0"), parse("1"), b, ctx);
            worst = std::min(worst, digits_between(bq.value, eval(beta.coeff, b, ctx)));
            QuadResult s = integrate(parse("x*sin(x)^n"), "x", parse("0"), parse("pi"), b, ctx);
            worst = std::min(worst, digits_between(s.value, eval(xsin.coeff, b, ctx)));
        }
    } catch (const std::exception& e) {
        outcome(1, false, "rule soundness vs quadrature", e.what());
        return;
    }
    double secs = seconds_since(t0);
    bool pass = worst >= 40 && secs < 60.0;
    outcome(1, pass, "rule soundness vs quadrature (n=0..20, >=40 digits, <60s)",
            "worst=" + std::to_string(worst) + " digits, " + std::to_string(secs) + "s");
}

// --- criterion 2: derivation replay ----------------------------------------

void criterion2() {
    EvalContext ctx = ctx_new(65);
    bool pass = true;
    std::string detail;
    try {
        auto records = load_catalog(CLAUSEN_MAIN_CATALOG);
        auto find = [&](const std::string& id) -> const IdentityRecord& {
            for (const auto& r : records)
                if (r.id == id) return r;
            throw usage_error("missing id " + id);
        };
        std::vector<Bindings> samples;
        for (const char* xs : {"1/4", "1/2", "3/4"}) {
            Bindings b;
            b.set_exact("x", Rat::parse(xs), ctx);
            samples.push_back(b);
        }
        Real tol = pow_si(Real(10, ctx.prec()), -50);
        // eq_2_3 -> eq_2_5
        SeriesSpec d1 = derive_chain(*find("eq_2_3").lhs_series,
                                     find("eq_2_5").chain->rules);
        Real dev1 = compare_termwise(d1, *find("eq_2_5").lhs_series, 0, 50, samples, ctx);
        // eq_5_8 -> eq_144
        SeriesSpec d2 = derive_chain(*find("eq_5_8").lhs_series,
                                     find("eq_144").chain->rules);
        Real dev2 = compare_termwise(d2, *find("eq_144").lhs_series, 0, 50, samples, ctx);
        pass = dev1 < tol && dev2 < tol;
        detail = "max deviations 10^" + std::to_string(dev1.is_zero() ? -999 : exponent10(dev1)) +
                 ", 10^" + std::to_string(dev2.is_zero() ? -999 : exponent10(dev2));
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    outcome(2, pass, "HJ chains reproduce eq 2/3 -> 2/5 and 5/8 -> 144 termwise to >=50 digits",
            detail);
}

// --- criteria 3/4/5: catalog verification at --digits 40 -------------------

std::vector<VerifyReport> g_reports;
std::vector<IdentityRecord> g_records;

void run_catalog() {
    g_records = load_catalog(CLAUSEN_MAIN_CATALOG);
    std::vector<const IdentityRecord*> sel;
    for (const auto& r : g_records) sel.push_back(&r);
    EvalContext ctx = ctx_new(40);
    unsigned jobs = std::max(2u, std::thread::hardware_concurrency());
    g_reports = verify_all(g_records, sel, Strategy::auto_pick, ctx, jobs);
}

const VerifyReport& report_of(const std::string& id) {
    for (const auto& r : g_reports)
        if (r.id == id) return r;
    throw usage_error("no report for " + id);
}

void criterion3() {
    const std::vector<std::string> required = {
        "intro_series", "borwein_chamberland", "zeta_sum_2pi2",
        "thm5", "thm6", "thm7", "thm8", "thm9",
        "ex1", "ex2", "ex3", "thm19", "thm20",
        "elliptic_series", "altharm_catalan", "beta_x2n", "quarter_beta",
    };
    bool pass = true;
    std::string detail;
    for (const auto& id : required) {
        try {
            const VerifyReport& r = report_of(id);
            long floor_digits = (id == "zeta_sum_2pi2") ? 20 : 35;
            bool ok = r.status == VerifyStatus::match && r.digits_matched >= floor_digits &&
                      r.wall_ms < 10000;
            if (!ok) {
                pass = false;
                detail += id + "(status=" + to_string(r.status) + ", digits=" +
                          std::to_string(r.digits_matched) + ", " + std::to_string(r.wall_ms) +
                          "ms) ";
            }
        } catch (const std::exception& e) {
            pass = false;
            detail += id + ": " + e.what() + " ";
        }
    }
    outcome(3, pass, "required identity suite matches to >=35 digits at 40 (zeta sum >=20), <10s each",
            detail);
}

void criterion4() {
    const std::vector<std::string> parametric = {
        "eq_cos2t", "eq_sin2", "eq_2_3", "eq_2_5", "eq_5_8",
        "jolley_sine", "binomial_sqrt", "heart_closed_form", "cubic_3f2_terminating",
    };
    bool pass = true;
    std::string detail;
    for (const auto& id : parametric) {
        const VerifyReport& r = report_of(id);
        bool ok = r.status == VerifyStatus::match && r.digits_matched >= 35;
        for (const auto& s : r.sample_results)
            ok = ok && s.status == VerifyStatus::match && s.digits >= 35;
        if (!ok) {
            pass = false;
            detail += id + "(digits=" + std::to_string(r.digits_matched) + ") ";
        }
    }
    outcome(4, pass, "parametric identities match at all catalog samples to >=35 digits", detail);
}

void criterion5() {
    bool pass = true;
    std::string detail;
    long audit_count = 0;
    for (std::size_t i = 0; i < g_records.size(); ++i) {
        if (g_records[i].expected_status != EntryStatus::audit) continue;
        ++audit_count;
        // a report exists for every audit entry, whatever its status
        try {
            (void)report_of(g_records[i].id);
        } catch (const std::exception&) {
            pass = false;
            detail += "missing report for " + g_records[i].id + " ";
        }
    }
    if (audit_count < 5) {
        pass = false;
        detail += "too few audit entries ";
    }
    const VerifyReport& lit = report_of("eq_144");
    if (!(lit.status == VerifyStatus::mismatch && lit.digits_matched <= 2)) {
        pass = false;
        detail += "eq_144 literal should mismatch at <=2 digits (got " +
                  std::string(to_string(lit.status)) + "/" + std::to_string(lit.digits_matched) +
                  ") ";
    }
    const VerifyReport& fix = report_of("eq_144_corrected");
    if (!(fix.status == VerifyStatus::match && fix.digits_matched >= 35)) {
        pass = false;
        detail += "eq_144_corrected should match at >=35 digits ";
    }
    outcome(5, pass, "audit entries report without failing; eq_144 literal <=2 digits, corrected >=35",
            detail);
}

// --- criterion 6: property suites ------------------------------------------

void criterion6() {
    bool pass = true;
    std::string info;
    try {
        // numkernel branch/reflection/recurrence over 10^4 samples
        EvalContext ctx = ctx_new(30);
        mpfr_prec_t p = ctx.prec();
        std::mt19937 rng(60601);
        std::uniform_real_distribution<double> u(-8.0, 8.0);
        for (long it = 0; it < 10000; ++it) {
            Complex z(real_from_double(u(rng), p), real_from_double(u(rng), p));
            if (abs(z) < Real(Rat(1, 100), p)) continue;
            Complex lz = c_log(z);
            if (!(lz.im() <= ctx.pi()) || !(-ctx.pi() < lz.im())) {
                pass = false;
                info += "log branch violation ";
                break;
            }
            if (it % 101 == 0 && digits_between(c_exp(lz), z) < 28) {
                pass = false;
                info += "exp(log z) != z ";
                break;
            }
            if (it % 211 == 0) {
                long q = 3 + (long)(rng() % 29);
                long pn = 1 + (long)(rng() % (q - 1));
                Rat x(pn, q);
                if (x != Rat(1, 2)) {
                    Complex cx(x, p);
                    Complex lhs = digamma(Complex(Rat(1) - x, p), ctx) - digamma(cx, ctx);
                    Complex rhs = Complex(ctx.pi()) * c_cot(Complex(ctx.pi()) * cx);
                    if (digits_between(lhs, rhs) < 27) {
                        pass = false;
                        info += "digamma reflection ";
                        break;
                    }
                }
            }
            if (it % 307 == 0) {
                Complex g1 = gamma(z + Complex(1, p), ctx);
                Complex g0 = z * gamma(z, ctx);
                bool near_pole = z.is_real() && z.re().is_integer() && z.re().sign() <= 0;
                if (!near_pole && digits_between(g1, g0) < 26) {
                    pass = false;
                    info += "gamma recurrence ";
                    break;
                }
            }
        }

        // hyper honesty on every catalog series representation
        EvalContext lo = ctx_new(30);
        EvalContext hi(40, 30);
        for (const auto& rec : g_records) {
            if (!rec.lhs_series) continue;
            Bindings b = sample_bindings(rec, 0, lo);
            Bindings bh = sample_bindings(rec, 0, hi);
            try {
                LhsValue vlo = detail::lhs_series_value(rec, b, lo);
                LhsValue vhi = detail::lhs_series_value(rec, bh, hi);
                Real d = abs(vlo.value - at_prec(vhi.value, lo.prec()));
                Real sc = abs(vlo.value);
                if (sc.is_zero()) sc = Real(1, lo.prec());
                Real claim = pow_si(Real(10, lo.prec()), -vlo.achieved_digits);
                if (!(d / sc < claim)) {
                    pass = false;
                    info += "honesty:" + rec.id + " ";
                }
            } catch (const std::exception&) {
                // entries whose series legitimately fail (documented audit
                // curiosities) are outside the honesty contract
                continue;
            }
        }

        // quad exactness
        Bindings b;
        QuadResult pol = integrate(parse("x^20 - 3*x^7 + 2"), "x", parse("0"), parse("1"),
                                   b, ctx_new(40));
        Complex pol_expect = eval(parse("1/21 - 3/8 + 2"), b, ctx_new(40));
        if (digits_between(pol.value, pol_expect) < 38) {
            pass = false;
            info += "poly exactness ";
        }
        QuadResult sing = integrate(parse("x^(-1/2)"), "x", parse("0"), parse("1"), b, ctx_new(40));
        if (digits_between(sing.value, Complex(2, sing.value.prec())) < 38) {
            pass = false;
            info += "singularity exactness ";
        }

        // exprdsl round-trip over the full catalog
        for (const auto& rec : g_records) {
            auto rt = [&](const ExprPtr& e) {
                if (e && !expr_equal(e, parse(print(e)))) {
                    pass = false;
                    info += "roundtrip:" + rec.id + " ";
                }
            };
            rt(rec.rhs);
            rt(rec.prefactor);
            if (rec.lhs_series) rt(rec.lhs_series->term);
            if (rec.lhs_integral) rt(rec.lhs_integral->integrand);
            if (rec.lhs_pfq) rt(rec.lhs_pfq->z);
        }
    } catch (const std::exception& e) {
        pass = false;
        info += e.what();
    }
    outcome(6, pass, "property suites (branch/reflection/recurrence, honesty, quad exactness, round-trip)",
            info);
}

// --- criterion 7: strategy cross-agreement ----------------------------------

void criterion7() {
    bool pass = true;
    std::string info;
    EvalContext ctx = ctx_new(40);
    try {
        for (const auto& rec : g_records) {
            if (rec.representation_count() < 2) continue;
            std::size_t nsamples = rec.parametric ? rec.samples.size() : 1;
            for (std::size_t i = 0; i < nsamples; ++i) {
                Bindings b = sample_bindings(rec, i, ctx);
                std::vector<LhsValue> vals;
                try {
                    if (rec.lhs_integral) vals.push_back(evaluate_lhs(rec, Strategy::integral, b, ctx));
                    if (rec.lhs_pfq) vals.push_back(evaluate_lhs(rec, Strategy::pfq, b, ctx));
                    if (rec.lhs_series) vals.push_back(evaluate_lhs(rec, Strategy::series, b, ctx));
                } catch (const std::exception&) {
                    continue; // an unavailable route is not a disagreement
                }
                for (std::size_t a = 0; a + 1 < vals.size(); ++a)
                    for (std::size_t c = a + 1; c < vals.size(); ++c) {
                        long common = std::min(vals[a].achieved_digits, vals[c].achieved_digits);
                        long got = digits_between(vals[a].value, vals[c].value);
                        if (got < common) {
                            pass = false;
                            info += rec.id + "[" + std::to_string(i) + "](" +
                                      std::to_string(got) + "<" + std::to_string(common) + ") ";
                        }
                    }
            }
        }
        // Theorem 19: acceleration route vs integral route to >= 12 digits
        const IdentityRecord* t19 = nullptr;
        for (const auto& r : g_records)
            if (r.id == "thm19") t19 = &r;
        Bindings b;
        LhsValue accel = evaluate_lhs(*t19, Strategy::pfq, b, ctx);
        LhsValue integ = evaluate_lhs(*t19, Strategy::integral, b, ctx);
        long agree = digits_between(accel.value, integ.value);
        if (agree < 12) {
            pass = false;
            info += "thm19 accel-vs-integral " + std::to_string(agree) + " ";
        }
    } catch (const std::exception& e) {
        pass = false;
        info += e.what();
    }
    outcome(7, pass, "multi-representation entries agree across strategies; thm19 accel vs integral >=12",
            info);
}

// --- criterion 8: CLI exit codes --------------------------------------------

int run_cli(const std::string& args) {
    std::string cmd = std::string(CLAUSEN_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WEXITSTATUS(rc);
}

void criterion8() {
    std::string fx = CLAUSEN_FIXTURE_DIR;
    bool pass = true;
    std::string detail;
    struct Case {
        std::string args;
        int expect;
    } cases[] = {
        {"verify --all --digits 25 --catalog " + fx + "/allpass.cat", 0},
        {"verify --all --digits 25 --catalog " + fx + "/perturbed.cat", 1},
        {"verify --all --digits 25 --catalog " + fx + "/malformed.cat", 2},
        {"verify --id nonexistent --digits 25 --catalog " + fx + "/allpass.cat", 2},
        {"verify --all --digits 25 --catalog " + fx + "/divergent.cat", 3},
    };
    for (const auto& c : cases) {
        int got = run_cli(c.args);
        if (got != c.expect) {
            pass = false;
            detail += "[" + c.args + " -> " + std::to_string(got) + " != " +
                      std::to_string(c.expect) + "] ";
        }
    }
    outcome(8, pass, "CLI exit codes 0/1/2/3 on fixture catalogs", detail);
}

} // namespace

int main() {
    auto t0 = std::chrono::steady_clock::now();
    criterion1();
    criterion2();
    run_catalog();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    std::cout << "acceptance total: " << (g_failures == 0 ? "PASS" : "FAIL") << " ("
              << seconds_since(t0) << "s)" << std::endl;
    return g_failures == 0 ? 0 : 1;
}
