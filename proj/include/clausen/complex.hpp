#pragma once

// Complex arithmetic over Real with principal-branch elementary functions.
// Branch conventions: Im(log z) in (-pi, pi]; inverse trig/hyperbolic of
// real arguments outside the real range promote to the principal complex
// value continuous from the upper half-plane, so acos(2) = -i*acosh(2).

#include "clausen/real.hpp"

#include <string>

namespace clausen {

class Complex {
public:
    explicit Complex(mpfr_prec_t prec) : re_(prec), im_(prec) {}
    Complex(Real re, Real im) : re_(std::move(re)), im_(std::move(im)) {}
    explicit Complex(Real re) : re_(std::move(re)), im_(re_.prec()) {}
    Complex(long v, mpfr_prec_t prec) : re_(v, prec), im_(prec) {}
    Complex(const Rat& v, mpfr_prec_t prec) : re_(v, prec), im_(prec) {}

    const Real& re() const { return re_; }
    const Real& im() const { return im_; }
    Real& re() { return re_; }
    Real& im() { return im_; }

    mpfr_prec_t prec() const { return std::max(re_.prec(), im_.prec()); }
    bool finite() const { return re_.finite() && im_.finite(); }
    bool is_zero() const { return re_.is_zero() && im_.is_zero(); }
    bool is_real() const { return im_.is_zero(); }

    friend Complex operator+(const Complex& a, const Complex& b) {
        return {a.re_ + b.re_, a.im_ + b.im_};
    }
    friend Complex operator-(const Complex& a, const Complex& b) {
        return {a.re_ - b.re_, a.im_ - b.im_};
    }
    friend Complex operator*(const Complex& a, const Complex& b) {
        if (a.is_real() && b.is_real()) return Complex(a.re_ * b.re_);
        return {a.re_ * b.re_ - a.im_ * b.im_, a.re_ * b.im_ + a.im_ * b.re_};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        if (b.is_zero()) throw domain_error("complex division by zero");
        if (b.is_real()) return {a.re_ / b.re_, a.im_ / b.re_};
        Real d = b.re_ * b.re_ + b.im_ * b.im_;
        return {(a.re_ * b.re_ + a.im_ * b.im_) / d, (a.im_ * b.re_ - a.re_ * b.im_) / d};
    }
    Complex operator-() const { return {-re_, -im_}; }

    Complex& operator+=(const Complex& b) { re_ += b.re_; im_ += b.im_; return *this; }
    Complex& operator-=(const Complex& b) { re_ -= b.re_; im_ -= b.im_; return *this; }
    Complex& operator*=(const Complex& b) { *this = *this * b; return *this; }
    Complex& operator/=(const Complex& b) { *this = *this / b; return *this; }

    friend bool operator==(const Complex& a, const Complex& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

    std::string str(int digits = 0) const {
        if (im_.is_zero()) return re_.str(digits);
        return re_.str(digits) + (im_.sign() < 0 ? " - " : " + ") + abs(im_).str(digits) + "*i";
    }

private:
    Real re_, im_;
};

inline Real abs(const Complex& z) { return hypot(z.re(), z.im()); }
inline Complex at_prec(const Complex& z, mpfr_prec_t prec) {
    return {at_prec(z.re(), prec), at_prec(z.im(), prec)};
}
inline Real arg(const Complex& z) { return atan2(z.im(), z.re()); }
inline Complex conj(const Complex& z) { return {z.re(), -z.im()}; }

inline Complex operator*(const Real& a, const Complex& b) { return Complex(a) * b; }
inline Complex operator*(const Complex& a, const Real& b) { return a * Complex(b); }

// ---------------------------------------------------------------------------
// Elementary functions.

inline Complex c_exp(const Complex& z) {
    Real ex = exp(z.re());
    if (z.is_real()) return Complex(ex);
    return {ex * cos(z.im()), ex * sin(z.im())};
}

// Principal logarithm, Im in (-pi, pi] (negative real axis maps to +pi).
inline Complex c_log(const Complex& z) {
    if (z.is_zero()) throw domain_error("log of zero");
    if (z.is_real() && z.re().sign() > 0) return Complex(log(z.re()));
    return {log(abs(z)), arg(z)};
}

inline Complex c_sqrt(const Complex& z) {
    if (z.is_real() && z.re().sign() >= 0) return Complex(sqrt(z.re()));
    Real m = sqrt(abs(z));
    Real a = arg(z) / Real(2, z.prec());
    return {m * cos(a), m * sin(a)};
}

inline Complex c_sin(const Complex& z) {
    if (z.is_real()) return Complex(sin(z.re()));
    return {sin(z.re()) * cosh(z.im()), cos(z.re()) * sinh(z.im())};
}
inline Complex c_cos(const Complex& z) {
    if (z.is_real()) return Complex(cos(z.re()));
    return {cos(z.re()) * cosh(z.im()), -(sin(z.re()) * sinh(z.im()))};
}
inline Complex c_tan(const Complex& z) { return c_sin(z) / c_cos(z); }
inline Complex c_sinh(const Complex& z) {
    if (z.is_real()) return Complex(sinh(z.re()));
    return {sinh(z.re()) * cos(z.im()), cosh(z.re()) * sin(z.im())};
}
inline Complex c_cosh(const Complex& z) {
    if (z.is_real()) return Complex(cosh(z.re()));
    return {cosh(z.re()) * cos(z.im()), sinh(z.re()) * sin(z.im())};
}
inline Complex c_tanh(const Complex& z) { return c_sinh(z) / c_cosh(z); }

inline Complex c_pow_int(Complex base, long e) {
    mpfr_prec_t p = base.prec();
    if (e == 0) return Complex(1, p);
    bool inv = e < 0;
    unsigned long n = inv ? -(unsigned long)e : (unsigned long)e;
    if (inv) {
        if (base.is_zero()) throw domain_error("0 raised to a negative power");
        base = Complex(1, p) / base;
    }
    Complex acc(1, p);
    while (n) {
        if (n & 1) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

// Principal power exp(w log z); 0^w defined only for Re(w) > 0.
inline Complex complex_pow(const Complex& z, const Complex& w) {
    mpfr_prec_t p = std::max(z.prec(), w.prec());
    if (z.is_zero()) {
        if (w.re().sign() > 0) return Complex(0, p);
        throw domain_error("0 raised to a power with Re <= 0");
    }
    if (w.is_real() && w.re().is_integer() && mpfr_fits_slong_p(w.re().raw(), MPFR_RNDN))
        return c_pow_int(z, w.re().to_long());
    if (z.is_real() && z.re().sign() > 0 && w.is_real())
        return Complex(pow(z.re(), w.re()));
    return c_exp(w * c_log(z));
}

inline Complex c_asin(const Complex& z) {
    mpfr_prec_t p = z.prec();
    if (z.is_real()) {
        const Real& x = z.re();
        if (cmp_si(abs(x), 1) <= 0) return Complex(asin(x));
        // principal value continuous from above the cut
        Real half_pi(p);
        mpfr_const_pi(half_pi.raw(), MPFR_RNDN);
        half_pi = half_pi / Real(2, p);
        Real a = acosh(abs(x));
        if (x.sign() > 0) return {half_pi, a};
        return {-half_pi, -a};
    }
    Complex one(1, p), iu(Real(0, p), Real(1, p));
    return -(iu * c_log(iu * z + c_sqrt(one - z * z)));
}

inline Complex c_acos(const Complex& z) {
    mpfr_prec_t p = z.prec();
    if (z.is_real() && cmp_si(abs(z.re()), 1) <= 0) return Complex(acos(z.re()));
    Real half_pi(p);
    mpfr_const_pi(half_pi.raw(), MPFR_RNDN);
    half_pi = half_pi / Real(2, p);
    Complex a = c_asin(z);
    return {half_pi - a.re(), -a.im()};
}

inline Complex c_atan(const Complex& z) {
    mpfr_prec_t p = z.prec();
    if (z.is_real()) return Complex(atan(z.re()));
    Complex one(1, p), iu(Real(0, p), Real(1, p));
    Complex izm = one - iu * z, izp = one + iu * z;
    if (izm.is_zero() || izp.is_zero()) throw domain_error("atan at pole +-i");
    return iu * (c_log(izm) - c_log(izp)) / Complex(2, p);
}

inline Complex c_atanh(const Complex& z) {
    mpfr_prec_t p = z.prec();
    if (z.is_real() && cmp_si(abs(z.re()), 1) < 0) return Complex(atanh(z.re()));
    Complex one(1, p);
    Complex a = one + z, b = one - z;
    if (a.is_zero() || b.is_zero()) throw domain_error("atanh at branch point +-1");
    return (c_log(a) - c_log(b)) / Complex(2, p);
}

inline Complex c_acosh(const Complex& z) {
    if (z.is_real() && cmp_si(z.re(), 1) >= 0) return Complex(acosh(z.re()));
    mpfr_prec_t p = z.prec();
    Complex one(1, p);
    return c_log(z + c_sqrt(z + one) * c_sqrt(z - one));
}

inline Complex c_asinh(const Complex& z) {
    if (z.is_real()) return Complex(asinh(z.re()));
    mpfr_prec_t p = z.prec();
    Complex one(1, p);
    return c_log(z + c_sqrt(z * z + one));
}

inline Complex c_csc(const Complex& z) {
    Complex s = c_sin(z);
    if (s.is_zero()) throw domain_error("csc at a pole");
    return Complex(1, z.prec()) / s;
}
inline Complex c_sec(const Complex& z) {
    Complex c = c_cos(z);
    if (c.is_zero()) throw domain_error("sec at a pole");
    return Complex(1, z.prec()) / c;
}
inline Complex c_cot(const Complex& z) {
    Complex s = c_sin(z);
    if (s.is_zero()) throw domain_error("cot at a pole");
    return c_cos(z) / s;
}
inline Complex c_coth(const Complex& z) {
    Complex s = c_sinh(z);
    if (s.is_zero()) throw domain_error("coth at a pole");
    return c_cosh(z) / s;
}

inline Complex c_inv(const Complex& z) {
    if (z.is_zero()) throw domain_error("reciprocal of zero");
    return Complex(1, z.prec()) / z;
}

inline Complex c_acot(const Complex& z) {
    if (z.is_zero()) {
        Real half_pi(z.prec());
        mpfr_const_pi(half_pi.raw(), MPFR_RNDN);
        return Complex(half_pi / Real(2, z.prec()));
    }
    return c_atan(c_inv(z));
}
inline Complex c_acoth(const Complex& z) { return c_atanh(c_inv(z)); }
inline Complex c_acsc(const Complex& z) { return c_asin(c_inv(z)); }
inline Complex c_asec(const Complex& z) { return c_acos(c_inv(z)); }

// ---------------------------------------------------------------------------

inline Complex const_value(const std::string& name, const EvalContext& ctx) {
    if (name == "pi") return Complex(ctx.pi());
    if (name == "euler_gamma") return Complex(ctx.euler_gamma());
    if (name == "catalan") return Complex(ctx.catalan());
    if (name == "i") return {ctx.make(0), ctx.make(1)};
    throw usage_error("unknown constant: " + name);
}

inline bool is_const_name(const std::string& name) {
    return name == "pi" || name == "euler_gamma" || name == "catalan" || name == "i";
}

} // namespace clausen
