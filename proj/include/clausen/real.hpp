#pragma once

// Arbitrary-precision building blocks: exact rationals (GMP), floating-point
// reals (MPFR), and the evaluation context that fixes working precision.

#include <gmp.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

namespace clausen {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    std::size_t offset;
    parse_error(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}
};

// ---------------------------------------------------------------------------
// Rat: exact rational number (canonical form maintained by GMP).

class Rat {
public:
    Rat() { mpq_init(q_); }
    Rat(long num, long den = 1) {
        mpq_init(q_);
        if (den == 0) throw domain_error("rational with zero denominator");
        mpq_set_si(q_, num, 1);
        if (den != 1) {
            Rat d(den);
            mpq_div(q_, q_, d.q_);
        }
    }
    Rat(const Rat& o) { mpq_init(q_); mpq_set(q_, o.q_); }
    Rat(Rat&& o) noexcept { mpq_init(q_); mpq_swap(q_, o.q_); }
    Rat& operator=(const Rat& o) { if (this != &o) mpq_set(q_, o.q_); return *this; }
    Rat& operator=(Rat&& o) noexcept { if (this != &o) mpq_swap(q_, o.q_); return *this; }
    ~Rat() { mpq_clear(q_); }

    // Parses "123", "-4/5", or a decimal like "0.25" (kept exact).
    static Rat parse(const std::string& s) {
        Rat r;
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            if (mpq_set_str(r.q_, s.c_str(), 10) != 0)
                throw domain_error("bad rational literal: " + s);
            mpq_canonicalize(r.q_);
            return r;
        }
        // decimal literal: exact scaled integer
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac = s.size() - dot - 1;
        if (digits.empty() || mpq_set_str(r.q_, digits.c_str(), 10) != 0)
            throw domain_error("bad decimal literal: " + s);
        mpz_ui_pow_ui(mpq_denref(r.q_), 10, (unsigned long)frac);
        mpq_canonicalize(r.q_);
        return r;
    }

    friend Rat operator+(const Rat& a, const Rat& b) { Rat r; mpq_add(r.q_, a.q_, b.q_); return r; }
    friend Rat operator-(const Rat& a, const Rat& b) { Rat r; mpq_sub(r.q_, a.q_, b.q_); return r; }
    friend Rat operator*(const Rat& a, const Rat& b) { Rat r; mpq_mul(r.q_, a.q_, b.q_); return r; }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.is_zero()) throw domain_error("rational division by zero");
        Rat r; mpq_div(r.q_, a.q_, b.q_); return r;
    }
    Rat operator-() const { Rat r; mpq_neg(r.q_, q_); return r; }

    Rat& operator+=(const Rat& b) { mpq_add(q_, q_, b.q_); return *this; }
    Rat& operator-=(const Rat& b) { mpq_sub(q_, q_, b.q_); return *this; }
    Rat& operator*=(const Rat& b) { mpq_mul(q_, q_, b.q_); return *this; }
    Rat& operator/=(const Rat& b) { *this = *this / b; return *this; }

    friend bool operator==(const Rat& a, const Rat& b) { return mpq_equal(a.q_, b.q_) != 0; }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) { return mpq_cmp(a.q_, b.q_) < 0; }
    friend bool operator<=(const Rat& a, const Rat& b) { return mpq_cmp(a.q_, b.q_) <= 0; }
    friend bool operator>(const Rat& a, const Rat& b) { return mpq_cmp(a.q_, b.q_) > 0; }
    friend bool operator>=(const Rat& a, const Rat& b) { return mpq_cmp(a.q_, b.q_) >= 0; }

    bool is_zero() const { return mpq_sgn(q_) == 0; }
    int sign() const { return mpq_sgn(q_); }
    bool is_integer() const { return mpz_cmp_ui(mpq_denref(q_), 1) == 0; }
    bool fits_long() const { return is_integer() && mpz_fits_slong_p(mpq_numref(q_)); }
    long to_long() const {
        if (!fits_long()) throw domain_error("rational is not a small integer");
        return mpz_get_si(mpq_numref(q_));
    }

    Rat pow_int(long e) const {
        if (e == 0) return Rat(1);
        Rat base = e < 0 ? Rat(1) / *this : *this;
        unsigned long n = e < 0 ? -(unsigned long)e : (unsigned long)e;
        Rat r;
        mpz_pow_ui(mpq_numref(r.q_), mpq_numref(base.q_), n);
        mpz_pow_ui(mpq_denref(r.q_), mpq_denref(base.q_), n);
        mpq_canonicalize(r.q_);
        return r;
    }

    std::string str() const {
        char* c = mpq_get_str(nullptr, 10, q_);
        std::string s(c);
        void (*freefn)(void*, size_t);
        mp_get_memory_functions(nullptr, nullptr, &freefn);
        freefn(c, s.size() + 1);
        return s;
    }

    const mpq_t& raw() const { return q_; }
    mpq_t& raw() { return q_; }

private:
    mpq_t q_;
};

// Exact factorial as a Rat.
inline Rat rat_factorial(long n) {
    if (n < 0) throw domain_error("factorial of negative integer");
    Rat r(1);
    mpz_fac_ui(mpq_numref(r.raw()), (unsigned long)n);
    return r;
}

inline Rat rat_double_factorial(long n) {
    // (-1)!! = 0!! = 1 by the usual convention.
    if (n < -1) throw domain_error("double factorial of integer below -1");
    Rat r(1);
    if (n >= 1) mpz_2fac_ui(mpq_numref(r.raw()), (unsigned long)n);
    return r;
}

inline Rat rat_binomial(long n, long k) {
    if (k < 0 || n < 0 || k > n) throw domain_error("binomial outside 0 <= k <= n");
    Rat r(1);
    mpz_bin_uiui(mpq_numref(r.raw()), (unsigned long)n, (unsigned long)k);
    return r;
}

// Rising factorial (a)_n for exact rational a and n >= 0.
inline Rat rat_pochhammer(const Rat& a, long n) {
    if (n < 0) throw domain_error("pochhammer with negative count");
    Rat r(1), f = a;
    for (long k = 0; k < n; ++k) {
        r *= f;
        f += Rat(1);
    }
    return r;
}

inline Rat rat_harmonic(long m) {
    if (m < 0) throw domain_error("harmonic number of negative index");
    Rat r(0);
    for (long j = 1; j <= m; ++j) r += Rat(1, j);
    return r;
}

// Alternating harmonic number H'_m = sum_{j=1..m} (-1)^(j+1)/j.
inline Rat rat_alt_harmonic(long m) {
    if (m < 0) throw domain_error("alternating harmonic number of negative index");
    Rat r(0);
    for (long j = 1; j <= m; ++j) r += Rat(j % 2 ? 1 : -1, j);
    return r;
}

// ---------------------------------------------------------------------------
// Real: MPFR floating-point value. Precision travels with the value; binary
// operations compute at the wider operand's precision.

class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
    Real(long v, mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_si(x_, v, MPFR_RNDN); }
    Real(int v, mpfr_prec_t prec) : Real((long)v, prec) {}
    Real(const Rat& v, mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_q(x_, v.raw(), MPFR_RNDN); }
    Real(const std::string& s, mpfr_prec_t prec) {
        mpfr_init2(x_, prec);
        if (mpfr_set_str(x_, s.c_str(), 10, MPFR_RNDN) != 0 && mpfr_nan_p(x_))
            throw domain_error("bad numeric literal: " + s);
    }
    Real(const Real& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    Real(Real&& o) noexcept { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_swap(x_, o.x_); }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(x_, mpfr_get_prec(o.x_));
            mpfr_set(x_, o.x_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept { if (this != &o) mpfr_swap(x_, o.x_); return *this; }
    ~Real() { mpfr_clear(x_); }

    mpfr_prec_t prec() const { return mpfr_get_prec(x_); }
    bool finite() const { return mpfr_number_p(x_) != 0; }
    bool is_zero() const { return mpfr_zero_p(x_) != 0; }
    int sign() const { return mpfr_sgn(x_); }
    bool is_integer() const { return finite() && mpfr_integer_p(x_) != 0; }

    long to_long() const {
        if (!is_integer() || !mpfr_fits_slong_p(x_, MPFR_RNDN))
            throw domain_error("value is not a small integer");
        return mpfr_get_si(x_, MPFR_RNDN);
    }
    double to_double() const { return mpfr_get_d(x_, MPFR_RNDN); }

    static Real max_prec_zero(const Real& a, const Real& b) {
        return Real(std::max(a.prec(), b.prec()));
    }

#define CLAUSEN_REAL_BINOP(op, fn)                                        \
    friend Real operator op(const Real& a, const Real& b) {               \
        Real r = max_prec_zero(a, b);                                     \
        fn(r.x_, a.x_, b.x_, MPFR_RNDN);                                  \
        return r;                                                         \
    }
    CLAUSEN_REAL_BINOP(+, mpfr_add)
    CLAUSEN_REAL_BINOP(-, mpfr_sub)
    CLAUSEN_REAL_BINOP(*, mpfr_mul)
#undef CLAUSEN_REAL_BINOP

    friend Real operator/(const Real& a, const Real& b) {
        if (b.is_zero()) throw domain_error("division by zero");
        Real r = max_prec_zero(a, b);
        mpfr_div(r.x_, a.x_, b.x_, MPFR_RNDN);
        return r;
    }
    Real operator-() const {
        Real r(*this);
        mpfr_neg(r.x_, r.x_, MPFR_RNDN);
        // keep zeros unsigned so atan2 picks the upper branch on the cut
        if (r.is_zero()) mpfr_set_zero(r.x_, 1);
        return r;
    }

    Real& operator+=(const Real& b) { mpfr_add(x_, x_, b.x_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& b) { mpfr_sub(x_, x_, b.x_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& b) { mpfr_mul(x_, x_, b.x_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& b) { *this = *this / b; return *this; }

    friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) < 0; }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) <= 0; }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) > 0; }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) >= 0; }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) == 0; }
    friend bool operator!=(const Real& a, const Real& b) { return mpfr_cmp(a.x_, b.x_) != 0; }

    friend int cmp_si(const Real& a, long b) { return mpfr_cmp_si(a.x_, b); }

    std::string str(int digits = 0) const {
        if (!finite()) return mpfr_nan_p(x_) ? "nan" : (sign() > 0 ? "inf" : "-inf");
        mpfr_exp_t e;
        char* c = mpfr_get_str(nullptr, &e, 10, digits > 0 ? (size_t)digits : 0, x_, MPFR_RNDN);
        std::string m(c);
        mpfr_free_str(c);
        bool neg = !m.empty() && m[0] == '-';
        std::string d = neg ? m.substr(1) : m;
        while (d.size() > 1 && d.back() == '0') d.pop_back();
        std::string out = (neg ? "-" : "");
        out += "0." + d + "e" + std::to_string((long)e);
        if (is_zero()) out = "0";
        return out;
    }

    const mpfr_t& raw() const { return x_; }
    mpfr_t& raw() { return x_; }

private:
    mpfr_t x_;
};

#define CLAUSEN_REAL_FN1(name, fn)            \
    inline Real name(const Real& a) {         \
        Real r(a.prec());                     \
        fn(r.raw(), a.raw(), MPFR_RNDN);      \
        return r;                             \
    }
CLAUSEN_REAL_FN1(sqrt, mpfr_sqrt)
CLAUSEN_REAL_FN1(exp, mpfr_exp)
CLAUSEN_REAL_FN1(log, mpfr_log)
CLAUSEN_REAL_FN1(sin, mpfr_sin)
CLAUSEN_REAL_FN1(cos, mpfr_cos)
CLAUSEN_REAL_FN1(tan, mpfr_tan)
CLAUSEN_REAL_FN1(asin, mpfr_asin)
CLAUSEN_REAL_FN1(acos, mpfr_acos)
CLAUSEN_REAL_FN1(atan, mpfr_atan)
CLAUSEN_REAL_FN1(sinh, mpfr_sinh)
CLAUSEN_REAL_FN1(cosh, mpfr_cosh)
CLAUSEN_REAL_FN1(tanh, mpfr_tanh)
CLAUSEN_REAL_FN1(asinh, mpfr_asinh)
CLAUSEN_REAL_FN1(acosh, mpfr_acosh)
CLAUSEN_REAL_FN1(atanh, mpfr_atanh)
CLAUSEN_REAL_FN1(abs, mpfr_abs)
#undef CLAUSEN_REAL_FN1

inline Real floor(const Real& a) {
    Real r(a.prec());
    mpfr_rint(r.raw(), a.raw(), MPFR_RNDD);
    return r;
}

inline Real atan2(const Real& y, const Real& x) {
    Real r = Real::max_prec_zero(y, x);
    mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
    return r;
}
inline Real hypot(const Real& a, const Real& b) {
    Real r = Real::max_prec_zero(a, b);
    mpfr_hypot(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
inline Real pow_si(const Real& a, long e) {
    Real r(a.prec());
    mpfr_pow_si(r.raw(), a.raw(), e, MPFR_RNDN);
    return r;
}
inline Real pow(const Real& a, const Real& b) {
    Real r = Real::max_prec_zero(a, b);
    mpfr_pow(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
    return r;
}
inline Real ldexp(const Real& a, long e) {
    Real r(a.prec());
    mpfr_mul_2si(r.raw(), a.raw(), e, MPFR_RNDN);
    return r;
}
inline Real at_prec(const Real& a, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set(r.raw(), a.raw(), MPFR_RNDN);
    return r;
}
inline Real real_from_double(double d, mpfr_prec_t prec) {
    Real r(prec);
    mpfr_set_d(r.raw(), d, MPFR_RNDN);
    return r;
}
// floor(log10(|a|)), -huge for zero; used for digit accounting.
inline long exponent10(const Real& a) {
    if (a.is_zero()) return -1000000000L;
    mpfr_exp_t e2 = mpfr_get_exp(a.raw());
    // 2^e2 bounds the magnitude; refine with a cheap log10 at low precision.
    Real lg(64);
    mpfr_abs(lg.raw(), a.raw(), MPFR_RNDN);
    mpfr_log10(lg.raw(), lg.raw(), MPFR_RNDN);
    mpfr_floor(lg.raw(), lg.raw());
    (void)e2;
    return mpfr_get_si(lg.raw(), MPFR_RNDN);
}

// ---------------------------------------------------------------------------
// EvalContext: requested digits plus guard digits; everything downstream
// computes at working precision and promises relative error <= 10^-target.

class EvalContext {
public:
    static constexpr long kMinDigits = 5;
    static constexpr long kDefaultGuard = 15;

    explicit EvalContext(long target_digits, long guard_digits = kDefaultGuard)
        : target_(target_digits), guard_(guard_digits) {
        if (target_ < kMinDigits || guard_ < kMinDigits)
            throw usage_error("EvalContext requires target_digits >= 5 and guard_digits >= 5");
        prec_ = digits_to_bits(target_ + guard_);
        pi_ = Real(prec_);
        mpfr_const_pi(pi_.raw(), MPFR_RNDN);
        euler_ = Real(prec_);
        mpfr_const_euler(euler_.raw(), MPFR_RNDN);
        catalan_ = Real(prec_);
        mpfr_const_catalan(catalan_.raw(), MPFR_RNDN);
        ln2_ = Real(prec_);
        mpfr_const_log2(ln2_.raw(), MPFR_RNDN);
    }

    long target_digits() const { return target_; }
    long guard_digits() const { return guard_; }
    mpfr_prec_t prec() const { return prec_; }

    const Real& pi() const { return pi_; }
    const Real& euler_gamma() const { return euler_; }
    const Real& catalan() const { return catalan_; }
    const Real& ln2() const { return ln2_; }

    Real make(long v = 0) const { return Real(v, prec_); }
    Real make(const Rat& v) const { return Real(v, prec_); }
    Real eps() const {
        Real r(1, prec_);
        return ldexp(r, -(long)prec_ + 4);
    }
    // 10^-target as the accuracy yardstick.
    Real tol() const {
        Real ten(10, prec_);
        return pow_si(ten, -target_);
    }

    EvalContext with_guard(long guard) const { return EvalContext(target_, guard); }
    EvalContext doubled_guard() const { return EvalContext(target_, 2 * guard_); }

    static mpfr_prec_t digits_to_bits(long digits) {
        return (mpfr_prec_t)((double)digits * 3.3219280948873626 + 16);
    }

private:
    long target_;
    long guard_;
    mpfr_prec_t prec_;
    Real pi_{64}, euler_{64}, catalan_{64}, ln2_{64};
};

inline EvalContext ctx_new(long target_digits) { return EvalContext(target_digits); }

} // namespace clausen
