#pragma once

// Special functions on top of the complex kernel: gamma, digamma, integer
// zeta, dilogarithm/trilogarithm, Lerch transcendent. Complex gamma and
// digamma use upward recurrence into the asymptotic (Stirling) regime with
// numerically cached Bernoulli numbers.

#include "clausen/complex.hpp"

#include <map>
#include <mutex>
#include <vector>

namespace clausen {

namespace detail {

// B_{2k} at the given precision, k >= 1.  B_{2k} = (-1)^{k+1} 2 (2k)! zeta(2k) / (2pi)^{2k}.
// Returned by value: the cache may grow concurrently.
inline Real bernoulli2k(std::size_t k, mpfr_prec_t prec) {
    static std::map<mpfr_prec_t, std::vector<Real>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto& tab = cache.emplace(prec, std::vector<Real>{}).first->second;
    while (tab.size() <= k) {
        std::size_t m = tab.size();
        if (m == 0) {
            tab.emplace_back(1, prec); // placeholder for k = 0
            continue;
        }
        Real z(prec), f(prec), p2pi(prec);
        mpfr_zeta_ui(z.raw(), (unsigned long)(2 * m), MPFR_RNDN);
        mpfr_fac_ui(f.raw(), (unsigned long)(2 * m), MPFR_RNDN);
        mpfr_const_pi(p2pi.raw(), MPFR_RNDN);
        p2pi = p2pi * Real(2, prec);
        Real b = Real(2, prec) * f * z / pow_si(p2pi, (long)(2 * m));
        if (m % 2 == 0) b = -b;
        tab.push_back(b);
    }
    return tab[k];
}

inline bool is_nonpositive_integer(const Complex& z) {
    return z.is_real() && z.re().is_integer() && z.re().sign() <= 0;
}

// log Gamma(z) for Re(z) large enough that the Stirling series converges
// well below the working tolerance.
inline Complex loggamma_asymptotic(const Complex& z, mpfr_prec_t prec) {
    Complex lz = c_log(z);
    Real half(Rat(1, 2), prec);
    Real ln2pi(prec);
    mpfr_const_pi(ln2pi.raw(), MPFR_RNDN);
    ln2pi = log(ln2pi * Real(2, prec));
    Complex acc = (z - Complex(Real(half))) * lz - z + Complex(Real(half * ln2pi));
    Complex zinv = c_inv(z);
    Complex z2inv = zinv * zinv;
    Complex t = zinv;
    Real eps(1, prec);
    eps = ldexp(eps, -(long)prec - 4);
    for (std::size_t k = 1; k < 4096; ++k) {
        const Real& b = bernoulli2k(k, prec);
        Complex term = Complex(b / Real((long)(2 * k) * (long)(2 * k - 1), prec)) * t;
        acc += term;
        if (abs(term) < eps * (abs(acc) + Real(1, prec))) return acc;
        t *= z2inv;
    }
    throw convergence_error("loggamma asymptotic series did not converge");
}

} // namespace detail

inline Complex gamma(const Complex& z, const EvalContext& ctx) {
    mpfr_prec_t p = ctx.prec();
    if (detail::is_nonpositive_integer(z))
        throw domain_error("gamma pole at nonpositive integer");
    if (z.is_real()) {
        Real r(p);
        mpfr_gamma(r.raw(), z.re().raw(), MPFR_RNDN);
        if (!r.finite()) throw domain_error("gamma overflowed or hit a pole");
        return Complex(r);
    }
    long z0 = (long)(0.30 * (double)p) + 12;
    Complex zz(z.re(), z.im());
    Complex shift_prod(1, p);
    long shifts = 0;
    while (cmp_si(zz.re(), z0) < 0) {
        shift_prod *= zz;
        zz += Complex(1, p);
        if (++shifts > 8 * z0) throw convergence_error("gamma recurrence shift ran away");
    }
    Complex lg = detail::loggamma_asymptotic(zz, p);
    return c_exp(lg) / shift_prod;
}

inline Complex digamma(const Complex& z, const EvalContext& ctx) {
    mpfr_prec_t p = ctx.prec();
    if (detail::is_nonpositive_integer(z))
        throw domain_error("digamma pole at nonpositive integer");
    if (z.is_real()) {
        Real r(p);
        mpfr_digamma(r.raw(), z.re().raw(), MPFR_RNDN);
        if (!r.finite()) throw domain_error("digamma hit a pole");
        return Complex(r);
    }
    long z0 = (long)(0.30 * (double)p) + 12;
    Complex zz(z.re(), z.im());
    Complex acc(0, p);
    long shifts = 0;
    while (cmp_si(zz.re(), z0) < 0) {
        acc -= c_inv(zz);
        zz += Complex(1, p);
        if (++shifts > 8 * z0) throw convergence_error("digamma recurrence shift ran away");
    }
    Real half(Rat(1, 2), p);
    acc += c_log(zz) - Complex(Real(half)) * c_inv(zz);
    Complex z2inv = c_inv(zz * zz);
    Complex t = z2inv;
    Real eps(1, p);
    eps = ldexp(eps, -(long)p - 4);
    for (std::size_t k = 1; k < 4096; ++k) {
        Complex term = Complex(detail::bernoulli2k(k, p) / Real((long)(2 * k), p)) * t;
        acc -= term;
        if (abs(term) < eps * (abs(acc) + Real(1, p))) return acc;
        t *= z2inv;
    }
    throw convergence_error("digamma asymptotic series did not converge");
}

inline Real zeta_int(long s, const EvalContext& ctx) {
    if (s < 2) throw usage_error("zeta_int requires s >= 2");
    Real r(ctx.prec());
    mpfr_zeta_ui(r.raw(), (unsigned long)s, MPFR_RNDN);
    return r;
}

namespace detail {

// zeta(s - k) for integer arguments, used by the polylog expansion.
inline Real zeta_at_int(long n, mpfr_prec_t prec) {
    if (n >= 2) {
        Real r(prec);
        mpfr_zeta_ui(r.raw(), (unsigned long)n, MPFR_RNDN);
        return r;
    }
    if (n == 0) return Real(Rat(-1, 2), prec);
    if (n == 1) throw domain_error("zeta pole at 1");
    long m = -n; // zeta(-m) = -B_{m+1}/(m+1)
    if (m % 2 == 0) return Real(0, prec); // odd Bernoulli numbers vanish
    return -(bernoulli2k((std::size_t)((m + 1) / 2), prec) / Real(m + 1, prec));
}

} // namespace detail

// Li_s(z) for s in {2,3}, |z| <= 1.
inline Complex polylog(long s, const Complex& z, const EvalContext& ctx) {
    if (s != 2 && s != 3) throw usage_error("polylog supports orders 2 and 3 only");
    mpfr_prec_t p = ctx.prec();
    Real az = abs(z);
    Real one(1, p);
    Real slack = ldexp(one, -(long)p / 2);
    if (az > one + slack) throw domain_error("polylog argument outside the closed unit disk");
    if (z.is_zero()) return Complex(0, p);
    Real eps(1, p);
    eps = ldexp(eps, -(long)p - 4);
    if (az <= Real(Rat(1, 2), p)) {
        Complex acc(0, p), zp = z;
        for (long k = 1; k < 1000000; ++k) {
            Complex term = zp / Complex(c_pow_int(Complex((long)k, p), s));
            acc += term;
            if (abs(term) < eps * (abs(acc) + eps)) return acc;
            zp *= z;
        }
        throw convergence_error("polylog series did not converge");
    }
    if (z.is_real() && z.re() == one)
        return Complex(s == 2 ? zeta_int(2, ctx) : zeta_int(3, ctx));
    // expansion in mu = log z about z = 1, valid for |mu| < 2 pi
    Complex mu = c_log(z);
    Complex lnm = c_log(-mu);
    Complex acc(0, p);
    if (s == 2) acc = mu * (Complex(1, p) - lnm);
    else acc = mu * mu * (Complex(Rat(3, 2), p) - lnm) / Complex(2, p);
    Complex mupk(1, p); // mu^k / k!
    int small_run = 0;  // zeta vanishes at negative even integers, so require a run
    for (long k = 0; k < 100000; ++k) {
        if (k != s - 1) {
            Complex term = Complex(detail::zeta_at_int(s - k, p)) * mupk;
            acc += term;
            small_run = (abs(term) < eps * (abs(acc) + eps)) ? small_run + 1 : 0;
            if (k > 4 && small_run >= 3) return acc;
        }
        mupk *= mu / Complex(k + 1, p);
    }
    throw convergence_error("polylog log-expansion did not converge");
}

// Lerch transcendent Phi(z, s, a) = sum_{k>=0} z^k / (k+a)^s for |z| bounded
// away from 1 (geometric tail) and integer s.
inline Complex lerch_phi(const Complex& z, long s, const Complex& a, const EvalContext& ctx) {
    mpfr_prec_t p = ctx.prec();
    Real az = abs(z);
    Real cap = Real(1, p) - Real(Rat(1, 1000), p);
    if (az > cap) throw domain_error("lerch_phi requires |z| <= 1 - 10^-3");
    if (a.is_real() && a.re().is_integer() && a.re().sign() <= 0)
        throw domain_error("lerch_phi pole: a + k vanishes for some k >= 0");
    Real eps(1, p);
    eps = ldexp(eps, -(long)p - 4);
    Complex acc(0, p), zp(1, p);
    for (long k = 0; k < 1000000; ++k) {
        Complex den = a + Complex(k, p);
        if (den.is_zero()) throw domain_error("lerch_phi pole: a + k vanishes");
        Complex term = zp * c_pow_int(den, -s);
        acc += term;
        if (k > 8 && abs(term) < eps * (abs(acc) + eps)) return acc;
        zp *= z;
    }
    throw convergence_error("lerch_phi series did not converge");
}

// Named elementary-function dispatch used by both the operation surface and
// the expression evaluator.
inline Complex elementary(const std::string& fn, const Complex& z, const EvalContext& ctx) {
    (void)ctx;
    if (fn == "exp") return c_exp(z);
    if (fn == "ln" || fn == "log") return c_log(z);
    if (fn == "sqrt") return c_sqrt(z);
    if (fn == "sin") return c_sin(z);
    if (fn == "cos") return c_cos(z);
    if (fn == "tan") return c_tan(z);
    if (fn == "csc") return c_csc(z);
    if (fn == "sec") return c_sec(z);
    if (fn == "cot") return c_cot(z);
    if (fn == "asin") return c_asin(z);
    if (fn == "acos") return c_acos(z);
    if (fn == "atan") return c_atan(z);
    if (fn == "acot") return c_acot(z);
    if (fn == "acsc") return c_acsc(z);
    if (fn == "asec") return c_asec(z);
    if (fn == "sinh") return c_sinh(z);
    if (fn == "cosh") return c_cosh(z);
    if (fn == "tanh") return c_tanh(z);
    if (fn == "coth") return c_coth(z);
    if (fn == "asinh") return c_asinh(z);
    if (fn == "acosh") return c_acosh(z);
    if (fn == "atanh") return c_atanh(z);
    if (fn == "acoth") return c_acoth(z);
    if (fn == "re") return Complex(z.re());
    if (fn == "im") return Complex(z.im());
    if (fn == "abs") return Complex(abs(z));
    throw usage_error("unknown elementary function: " + fn);
}

} // namespace clausen
