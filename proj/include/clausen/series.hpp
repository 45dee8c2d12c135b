#pragma once

// Summation engine: generalized hypergeometric evaluation with convergence
// classification, generic term-by-term summation with tail bounds, and
// sequence acceleration (Levin u, Wynn epsilon) for algebraically decaying
// tails such as pFq at unit argument.

#include "clausen/expr.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace clausen {

enum class SumMethod { direct, levin_u, wynn_epsilon };

inline const char* to_string(SumMethod m) {
    switch (m) {
        case SumMethod::direct: return "direct";
        case SumMethod::levin_u: return "levin_u";
        default: return "wynn_epsilon";
    }
}

struct SumResult {
    Complex value;
    long achieved_digits = 0;
    long terms_used = 0;
    SumMethod method = SumMethod::direct;
    std::optional<Rat> exact; // populated for terminating rational sums
};

enum class ConvKind { terminating, geometric, algebraic, divergent, boundary_unknown };

struct ConvergenceClass {
    ConvKind kind;
    double ratio = 0.0;   // geometric: |z|
    Rat exponent;         // algebraic: s = sum(bottoms) - sum(tops)
    long last_term = -1;  // terminating: index of the last nonzero term
};

struct PFQSpec {
    std::vector<Rat> tops;
    std::vector<Rat> bottoms;
    ExprPtr z;
};

struct SeriesSpec {
    long start = 0;
    ExprPtr term;              // expression in the summation variable (and parameters)
    std::string var = "n";
};

// ---------------------------------------------------------------------------
// Classification.

inline ConvergenceClass pfq_classify(const PFQSpec& spec, const Bindings& b = {}) {
    ConvergenceClass cc{ConvKind::boundary_unknown, 0.0, Rat(0), -1};

    long top_term = -1; // smallest k with (a)_{k+1} = 0
    for (const auto& a : spec.tops)
        if (a.is_integer() && a.sign() <= 0) {
            long k = -a.to_long();
            if (top_term < 0 || k < top_term) top_term = k;
        }
    long bottom_pole = -1; // smallest k from which a bottom pochhammer vanishes
    for (const auto& bb : spec.bottoms)
        if (bb.is_integer() && bb.sign() <= 0) {
            long k = -bb.to_long() + 1;
            if (bottom_pole < 0 || k < bottom_pole) bottom_pole = k;
        }
    if (top_term >= 0 && (bottom_pole < 0 || top_term < bottom_pole)) {
        cc.kind = ConvKind::terminating;
        cc.last_term = top_term;
        return cc;
    }
    if (bottom_pole >= 0) {
        cc.kind = ConvKind::divergent; // pochhammer pole, sum undefined
        return cc;
    }

    auto zr = detail::try_exact(*spec.z, b);
    if (zr) {
        if (zr->is_zero()) { cc.kind = ConvKind::terminating; cc.last_term = 0; return cc; }
        Rat az = zr->sign() < 0 ? -*zr : *zr;
        if (az < Rat(1)) {
            cc.kind = ConvKind::geometric;
            cc.ratio = std::abs(Real(*zr, 64).to_double());
            return cc;
        }
        if (az > Rat(1)) { cc.kind = ConvKind::divergent; return cc; }
        if (*zr == Rat(1)) {
            Rat s(0);
            for (const auto& v : spec.bottoms) s += v;
            for (const auto& v : spec.tops) s -= v;
            cc.exponent = s;
            cc.kind = s.sign() > 0 ? ConvKind::algebraic : ConvKind::divergent;
            return cc;
        }
        cc.kind = ConvKind::boundary_unknown; // z = -1
        return cc;
    }
    // symbolic argument: nothing more can be said without a value
    return cc;
}

// ---------------------------------------------------------------------------
// Acceleration.

namespace detail {

struct PlateauTracker {
    long best = 0;
    Complex value;
    explicit PlateauTracker(mpfr_prec_t p) : value(0, p) {}

    void offer(const Complex& prev, const Complex& cur) {
        Real d = abs(cur - prev);
        Real sc = abs(cur) + abs(prev);
        if (sc.is_zero()) return;
        if (d.is_zero()) {
            best = 1000000;
            value = cur;
            return;
        }
        long digits = -exponent10(d / sc);
        if (digits > best) {
            best = digits;
            value = cur;
        }
    }
};

} // namespace detail

// Extrapolates sum(terms) with the chosen transform. The generator returns
// term k (k = 0, 1, ...). Work happens at twice the context precision; the
// reported digit count is the observed inter-order agreement plateau less 2.
inline SumResult accelerate(const std::function<Complex(long)>& term_at,
                            SumMethod method, const EvalContext& ctx,
                            long max_terms = 0) {
    if (method == SumMethod::direct) throw usage_error("accelerate requires a transform method");
    mpfr_prec_t wp = 2 * ctx.prec() + 64;
    long target = ctx.target_digits();
    if (max_terms <= 0) max_terms = std::max<long>(80, 8 * target);

    detail::PlateauTracker plateau(wp);
    Real beta(1, wp);
    Real tiny(1, wp);
    tiny = ldexp(tiny, -(long)wp * 2);

    if (method == SumMethod::levin_u) {
        std::vector<Complex> num, den;   // s_j / w_j and 1 / w_j
        std::vector<Real> powj;          // (beta + j)^(k-1) for the current order k
        Complex s(0, wp);
        Complex prev_est(0, wp);
        bool have_prev = false;
        for (long k = 0; k < max_terms; ++k) {
            Complex a = at_prec(term_at(k), wp);
            s += a;
            Complex w = Complex(beta + Real(k, wp)) * a;
            if (abs(w).is_zero()) w = Complex(tiny);
            num.push_back(s / w);
            den.push_back(c_inv(w));
            // maintain powj[j] = (beta+j)^(k-1)
            for (long j = 0; j < k; ++j) powj[j] = powj[j] * (beta + Real(j, wp));
            Real pk(wp);
            if (k == 0) pk = Real(1, wp) / (beta + Real(0, wp)); // (beta+0)^(-1), unused
            else mpfr_pow_ui(pk.raw(), (beta + Real(k, wp)).raw(), (unsigned long)(k - 1), MPFR_RNDN);
            powj.push_back(pk);
            if (k < 2) continue;
            Complex Np(0, wp), Dp(0, wp);
            Real binom(1, wp);
            for (long j = 0; j <= k; ++j) {
                Real coef = binom * powj[j];
                if (j & 1) coef = -coef;
                Np += Complex(coef) * num[j];
                Dp += Complex(coef) * den[j];
                binom = binom * Real(k - j, wp) / Real(j + 1, wp);
            }
            if (abs(Dp).is_zero()) continue;
            Complex est = Np / Dp;
            if (have_prev) plateau.offer(prev_est, est);
            prev_est = est;
            have_prev = true;
            if (plateau.best >= target + 4) break;
        }
        long achieved = plateau.best - 2;
        if (achieved < 10)
            throw convergence_error("levin_u failed to reach a stable plateau");
        return SumResult{at_prec(plateau.value, ctx.prec()), std::min(achieved, target),
                         (long)num.size(), SumMethod::levin_u, std::nullopt};
    }

    // Wynn epsilon
    std::vector<Complex> eps;
    Complex s(0, wp);
    Complex prev_best(0, wp);
    bool have_prev = false;
    long used = 0;
    for (long m = 0; m < max_terms; ++m) {
        s += at_prec(term_at(m), wp);
        used = m + 1;
        std::vector<Complex> prev = eps;
        eps.assign((std::size_t)m + 1, Complex(0, wp));
        eps[0] = s;
        for (long j = 1; j <= m; ++j) {
            Complex denom = eps[j - 1] - prev[j - 1];
            if (abs(denom).is_zero()) denom = Complex(tiny);
            Complex lower = (j >= 2) ? prev[j - 2] : Complex(0, wp);
            eps[j] = lower + c_inv(denom);
        }
        long j_even = m - (m % 2);
        if (j_even >= 2) {
            const Complex& est = eps[j_even];
            if (have_prev) plateau.offer(prev_best, est);
            prev_best = est;
            have_prev = true;
            if (plateau.best >= target + 4) break;
        }
    }
    long achieved = plateau.best - 3; // epsilon plateaus wobble more than Levin's
    if (achieved < 10)
        throw convergence_error("wynn_epsilon failed to reach a stable plateau");
    return SumResult{at_prec(plateau.value, ctx.prec()), std::min(achieved, target),
                     used, SumMethod::wynn_epsilon, std::nullopt};
}

// ---------------------------------------------------------------------------
// pFq summation.

inline SumResult pfq_sum(const PFQSpec& spec, const EvalContext& ctx, const Bindings& b = {}) {
    ConvergenceClass cc = pfq_classify(spec, b);
    if (cc.kind == ConvKind::divergent)
        throw convergence_error("pfq_sum on a divergent specification");
    if (cc.kind == ConvKind::boundary_unknown)
        throw convergence_error("pfq_sum cannot bound the tail on the unit circle away from z=1");

    auto zr = detail::try_exact(*spec.z, b);

    if (cc.kind == ConvKind::terminating && zr) {
        Rat t(1), acc(1);
        for (long k = 0; k <= cc.last_term; ++k) {
            Rat f = *zr / Rat(k + 1);
            for (const auto& a : spec.tops) f *= (a + Rat(k));
            for (const auto& bb : spec.bottoms) f /= (bb + Rat(k));
            t *= f;
            if (t.is_zero()) break;
            acc += t;
        }
        SumResult r{Complex(acc, ctx.prec()), ctx.target_digits(), cc.last_term + 1,
                    SumMethod::direct, acc};
        return r;
    }

    mpfr_prec_t p = ctx.prec();
    Complex z = eval(spec.z, b, ctx);

    if (cc.kind == ConvKind::terminating) {
        Complex t(1, p), acc(1, p);
        for (long k = 0; k <= cc.last_term; ++k) {
            Complex f = z / Complex(k + 1, p);
            for (const auto& a : spec.tops) f *= Complex(a + Rat(k), p);
            for (const auto& bb : spec.bottoms) f /= Complex(bb + Rat(k), p);
            t *= f;
            acc += t;
        }
        return SumResult{acc, ctx.target_digits(), cc.last_term + 1, SumMethod::direct, std::nullopt};
    }

    if (cc.kind == ConvKind::algebraic) {
        // z = 1, algebraic tail: accelerate the term sequence
        auto term_state = std::make_shared<std::pair<long, Complex>>(-1, Complex(1, 2 * p + 64));
        mpfr_prec_t wp = 2 * p + 64;
        auto gen = [spec, term_state, wp](long k) -> Complex {
            auto& [last, t] = *term_state;
            if (k != last + 1) throw usage_error("pfq term generator is single-consumer");
            if (k > 0) {
                Complex f(1, wp);
                long m = k - 1;
                for (const auto& a : spec.tops) f *= Complex(a + Rat(m), wp);
                for (const auto& bb : spec.bottoms) f /= Complex(bb + Rat(m), wp);
                t *= f / Complex(m + 1, wp);
            }
            last = k;
            return t;
        };
        SumResult r = accelerate(gen, SumMethod::levin_u, ctx);
        if (r.achieved_digits < 10)
            throw convergence_error("pfq acceleration fell below 10 digits");
        return r;
    }

    // geometric |z| < 1: direct recurrence with a validated tail bound
    Real az = abs(z);
    Complex t(1, p), acc(1, p);
    Real one(1, p);
    Real prev_ratio = az;
    Real tol = ctx.tol() * pow_si(Real(10, p), -(ctx.guard_digits() / 2));
    for (long k = 0; k < 1000000; ++k) {
        Complex f = z / Complex(k + 1, p);
        for (const auto& a : spec.tops) f *= Complex(a + Rat(k), p);
        for (const auto& bb : spec.bottoms) f /= Complex(bb + Rat(k), p);
        Real ratio = abs(f);
        t = t * f;
        acc += t;
        if (k >= 8) {
            Real r_hat = az;
            if (ratio > r_hat) r_hat = ratio;
            if (prev_ratio > r_hat) r_hat = prev_ratio;
            if (r_hat < one) {
                Real bound = abs(t) * r_hat / (one - r_hat);
                if (bound < tol * (abs(acc) + one))
                    return SumResult{acc, ctx.target_digits(), k + 1, SumMethod::direct, std::nullopt};
            }
        }
        prev_ratio = ratio;
    }
    throw convergence_error("pfq_sum hit the iteration cap");
}

// ---------------------------------------------------------------------------
// Generic series summation from a term expression.

inline SumResult series_sum_direct(const SeriesSpec& s, const Bindings& b,
                                   const EvalContext& ctx, long cap = 1000000) {
    mpfr_prec_t p = ctx.prec();
    Bindings local = b;
    auto term_at = [&](long n) {
        local.set_exact(s.var, Rat(n), ctx);
        return eval(s.term, local, ctx);
    };

    constexpr long probe_window = 32;
    std::vector<Complex> probe;
    Complex acc(0, p);
    for (long i = 0; i < probe_window; ++i) {
        Complex t = term_at(s.start + i);
        probe.push_back(t);
        acc += t;
    }
    // empirical ratio over the probe tail
    Real rmax(0, p);
    bool all_zero = true;
    for (long i = probe_window / 2; i + 1 < probe_window; ++i) {
        Real a0 = abs(probe[i]), a1 = abs(probe[i + 1]);
        if (a0.is_zero()) continue;
        all_zero = false;
        Real r = a1 / a0;
        if (r > rmax) rmax = r;
    }
    if (all_zero) {
        bool really = true;
        for (const auto& t : probe) really = really && abs(t).is_zero();
        if (really)
            return SumResult{acc, ctx.target_digits(), probe_window, SumMethod::direct, std::nullopt};
    }

    Real one(1, p);
    Real tol = ctx.tol() * pow_si(Real(10, p), -(ctx.guard_digits() / 2));

    // a ratio drifting towards 1 beyond the window means an algebraic tail
    bool drifting = false;
    {
        Real a30 = abs(probe[probe_window - 2]), a31 = abs(probe[probe_window - 1]);
        Real a64 = abs(term_at(s.start + 64)), a65 = abs(term_at(s.start + 65));
        if (!a30.is_zero() && !a64.is_zero()) {
            double r31 = (a31 / a30).to_double();
            double r64 = (a65 / a64).to_double();
            drifting = r64 >= 0.995 || (r64 - r31) > 0.004;
        }
    }
    if (rmax < Real(Rat(99, 100), p) && !drifting) {
        // geometric tail
        std::vector<Real> recent;
        Complex t = probe.back();
        for (long n = s.start + probe_window; n < s.start + cap; ++n) {
            Complex tn = term_at(n);
            Real prev = abs(t);
            t = tn;
            acc += t;
            if (!prev.is_zero()) {
                recent.push_back(abs(t) / prev);
                if (recent.size() > 8) recent.erase(recent.begin());
            }
            Real r_hat = rmax;
            for (const auto& r : recent)
                if (r > r_hat) r_hat = r;
            if (r_hat < one) {
                Real bound = abs(t) * r_hat / (one - r_hat);
                if (bound < tol * (abs(acc) + one))
                    return SumResult{acc, ctx.target_digits(), n - s.start + 1,
                                     SumMethod::direct, std::nullopt};
            }
        }
        throw convergence_error("series_sum_direct hit the iteration cap");
    }

    // algebraic tail: |t_n| ~ C n^-q, integral comparison bound t_n * n/(q-1)
    Real a_half = abs(probe[probe_window / 2 - 1]);
    Real a_full = abs(probe.back());
    if (a_half.is_zero() || a_full.is_zero() || a_full >= a_half)
        throw convergence_error("series_sum_direct: no decay detected in probe window");
    double n1 = (double)(s.start + probe_window / 2 - 1);
    double n2 = (double)(s.start + probe_window - 1);
    double q = -std::log((abs(probe.back()) / a_half).to_double()) / std::log(n2 / n1);
    if (q <= 1.0)
        throw convergence_error("series_sum_direct: algebraic tail does not converge");
    // estimate how far the integral bound must run; bail out early if the
    // cap cannot possibly be enough
    {
        double b0 = std::max(a_full.to_double() * n2 / (q - 1.0), 1e-300);
        double t0 = (tol * (abs(acc) + one)).to_double();
        double need = n2 * std::pow(b0 / std::max(t0, 1e-300), 1.0 / (q - 1.0));
        if (!(need < (double)cap))
            throw convergence_error("series_sum_direct: algebraic tail needs more than the "
                                    "iteration cap; use acceleration");
    }
    Real qm1 = real_from_double(q - 1.0, p);
    Complex t = probe.back();
    for (long n = s.start + probe_window; n < s.start + cap; ++n) {
        t = term_at(n);
        acc += t;
        Real bound = abs(t) * Real(n, p) / qm1;
        if (bound < tol * (abs(acc) + one))
            return SumResult{acc, ctx.target_digits(), n - s.start + 1, SumMethod::direct,
                             std::nullopt};
    }
    throw convergence_error("series_sum_direct hit the iteration cap (algebraic tail)");
}

// Accelerated summation of a series specification (used when the empirical
// tail is not geometric).
inline SumResult series_sum_accelerated(const SeriesSpec& s, const Bindings& b,
                                        const EvalContext& ctx, SumMethod method = SumMethod::levin_u,
                                        long max_terms = 0) {
    EvalContext inner(ctx.target_digits(), 2 * ctx.guard_digits() + ctx.target_digits());
    auto binding_copy = std::make_shared<Bindings>(b);
    auto gen = [s, binding_copy, inner](long k) {
        Bindings local = *binding_copy;
        local.set_exact(s.var, Rat(s.start + k), inner);
        return eval(s.term, local, inner);
    };
    return accelerate(gen, method, ctx, max_terms);
}

} // namespace clausen
