#pragma once

// Executable form of the termwise-integration derivations: structured series
// terms coeff(n) * x^(pn+q) * prod (1-x^r)^(p'n+q'), transform rules with
// exact exponent bookkeeping, and chain replay with termwise comparison.

#include "clausen/quadrature.hpp"
#include "clausen/series.hpp"

#include <sstream>

namespace clausen {

// p*n + q with exact rational coefficients.
struct LinForm {
    Rat p, q;
    LinForm() : p(0), q(0) {}
    LinForm(Rat p_, Rat q_) : p(std::move(p_)), q(std::move(q_)) {}

    LinForm operator+(const LinForm& o) const { return {p + o.p, q + o.q}; }
    LinForm operator-(const LinForm& o) const { return {p - o.p, q - o.q}; }
    LinForm scaled(const Rat& c) const { return {p * c, q * c}; }
    bool operator==(const LinForm& o) const { return p == o.p && q == o.q; }
    bool is_zero() const { return p.is_zero() && q.is_zero(); }
    Rat at(long n) const { return p * Rat(n) + q; }

    std::string str(const std::string& var = "n") const {
        if (p.is_zero()) return q.str();
        std::string s = "(" + p.str() + ")*" + var;
        if (!q.is_zero()) s += " + (" + q.str() + ")";
        return "(" + s + ")";
    }
};

struct PatternFactor {
    long base_exponent = 1; // r in (1 - x^r)
    LinForm outer;
};

struct TermPattern {
    ExprPtr coeff;                     // n-only part
    LinForm xpow;                      // exponent of x
    std::vector<PatternFactor> factors;
    std::string nvar = "n";
    std::string xvar = "x";
};

enum class RuleKind { beta_01, wallis, x_sin_pi, integrate_0x, multiply_xpow, substitute_x_sq };

struct TransformRule {
    RuleKind kind;
    long k = 0; // multiply_xpow amount

    std::string str() const {
        switch (kind) {
            case RuleKind::beta_01: return "beta_01";
            case RuleKind::wallis: return "wallis";
            case RuleKind::x_sin_pi: return "x_sin_pi";
            case RuleKind::integrate_0x: return "integrate_0x";
            case RuleKind::multiply_xpow: return "multiply_xpow(" + std::to_string(k) + ")";
            default: return "substitute_x_sq";
        }
    }
    static TransformRule parse(const std::string& tok) {
        if (tok == "beta_01") return {RuleKind::beta_01};
        if (tok == "wallis") return {RuleKind::wallis};
        if (tok == "x_sin_pi") return {RuleKind::x_sin_pi};
        if (tok == "integrate_0x") return {RuleKind::integrate_0x};
        if (tok == "substitute_x_sq") return {RuleKind::substitute_x_sq};
        if (tok.rfind("multiply_xpow(", 0) == 0 && tok.back() == ')') {
            long k = std::stol(tok.substr(14, tok.size() - 15));
            return {RuleKind::multiply_xpow, k};
        }
        throw usage_error("unknown transform rule: " + tok);
    }
};

// ---------------------------------------------------------------------------
// Pattern extraction.

namespace detail {

// Linear form in `nvar` with exact rational coefficients, or nullopt.
inline std::optional<LinForm> lin_of(const Expr& e, const std::string& nvar) {
    switch (e.kind) {
        case ExprKind::number: return LinForm{Rat(0), e.number};
        case ExprKind::variable:
            if (e.name == nvar) return LinForm{Rat(1), Rat(0)};
            return std::nullopt;
        case ExprKind::neg: {
            auto a = lin_of(*e.args[0], nvar);
            if (!a) return std::nullopt;
            return LinForm{-a->p, -a->q};
        }
        case ExprKind::add:
        case ExprKind::sub: {
            auto a = lin_of(*e.args[0], nvar), b = lin_of(*e.args[1], nvar);
            if (!a || !b) return std::nullopt;
            return e.kind == ExprKind::add ? *a + *b : *a - *b;
        }
        case ExprKind::mul: {
            auto a = lin_of(*e.args[0], nvar), b = lin_of(*e.args[1], nvar);
            if (!a || !b) return std::nullopt;
            if (a->p.is_zero()) return b->scaled(a->q);
            if (b->p.is_zero()) return a->scaled(b->q);
            return std::nullopt;
        }
        case ExprKind::div: {
            auto a = lin_of(*e.args[0], nvar), b = lin_of(*e.args[1], nvar);
            if (!a || !b || !b->p.is_zero() || b->q.is_zero()) return std::nullopt;
            return a->scaled(Rat(1) / b->q);
        }
        default: return std::nullopt;
    }
}

inline bool contains_var(const Expr& e, const std::string& v) {
    if (e.kind == ExprKind::variable && e.name == v) return true;
    for (const auto& a : e.args)
        if (contains_var(*a, v)) return true;
    return false;
}

// Recognizes 1 - x^r (r positive integer; bare x means r = 1).
inline std::optional<long> one_minus_xpow(const Expr& e, const std::string& xvar) {
    if (e.kind != ExprKind::sub) return std::nullopt;
    const Expr& lhs = *e.args[0];
    const Expr& rhs = *e.args[1];
    if (lhs.kind != ExprKind::number || lhs.number != Rat(1)) return std::nullopt;
    if (rhs.kind == ExprKind::variable && rhs.name == xvar) return 1;
    if (rhs.kind == ExprKind::pow && rhs.args[0]->kind == ExprKind::variable &&
        rhs.args[0]->name == xvar && rhs.args[1]->kind == ExprKind::number &&
        rhs.args[1]->number.is_integer() && rhs.args[1]->number.sign() > 0)
        return rhs.args[1]->number.to_long();
    return std::nullopt;
}

inline void pattern_scan(const ExprPtr& e, const Rat& expo_sign, TermPattern& out,
                         std::vector<ExprPtr>& coeff_parts, std::vector<ExprPtr>& inv_parts) {
    const std::string& x = out.xvar;
    if (!contains_var(*e, x)) {
        (expo_sign.sign() > 0 ? coeff_parts : inv_parts).push_back(e);
        return;
    }
    switch (e->kind) {
        case ExprKind::mul:
            pattern_scan(e->args[0], expo_sign, out, coeff_parts, inv_parts);
            pattern_scan(e->args[1], expo_sign, out, coeff_parts, inv_parts);
            return;
        case ExprKind::div:
            pattern_scan(e->args[0], expo_sign, out, coeff_parts, inv_parts);
            pattern_scan(e->args[1], -expo_sign, out, coeff_parts, inv_parts);
            return;
        case ExprKind::neg: {
            coeff_parts.push_back(Expr::make_number(Rat(-1)));
            pattern_scan(e->args[0], expo_sign, out, coeff_parts, inv_parts);
            return;
        }
        case ExprKind::variable:
            if (e->name == x) {
                out.xpow = out.xpow + LinForm{Rat(0), expo_sign};
                return;
            }
            break;
        case ExprKind::pow: {
            auto lin = lin_of(*e->args[1], out.nvar);
            if (!lin) break;
            const Expr& base = *e->args[0];
            if (base.kind == ExprKind::variable && base.name == x) {
                out.xpow = out.xpow + lin->scaled(expo_sign);
                return;
            }
            if (auto r = one_minus_xpow(base, x)) {
                out.factors.push_back(PatternFactor{*r, lin->scaled(expo_sign)});
                return;
            }
            break;
        }
        case ExprKind::sub:
            if (auto r = one_minus_xpow(*e, x)) {
                out.factors.push_back(PatternFactor{*r, LinForm{Rat(0), expo_sign}});
                return;
            }
            break;
        default: break;
    }
    throw domain_error("term is not in the pattern language (offending part: " +
                       print(e) + ")");
}

inline ExprPtr lin_to_expr(const LinForm& f, const std::string& var) {
    return parse(f.str(var));
}

} // namespace detail

// Decomposes a term into coeff(n) * x^lin * prod (1 - x^r)^lin.
inline TermPattern pattern_of(const ExprPtr& term, const std::string& nvar = "n",
                              const std::string& xvar = "x") {
    TermPattern out;
    out.nvar = nvar;
    out.xvar = xvar;
    std::vector<ExprPtr> coeff_parts, inv_parts;
    detail::pattern_scan(term, Rat(1), out, coeff_parts, inv_parts);

    // merge repeated (1-x^r) bases
    std::vector<PatternFactor> merged;
    for (const auto& f : out.factors) {
        bool found = false;
        for (auto& m : merged)
            if (m.base_exponent == f.base_exponent) {
                m.outer = m.outer + f.outer;
                found = true;
            }
        if (!found) merged.push_back(f);
    }
    out.factors.clear();
    for (auto& m : merged)
        if (!m.outer.is_zero()) out.factors.push_back(m);

    ExprPtr coeff;
    for (const auto& part : coeff_parts)
        coeff = coeff ? Expr::make_op(ExprKind::mul, {coeff, part}) : part;
    if (!coeff) coeff = Expr::make_number(Rat(1));
    for (const auto& part : inv_parts)
        coeff = Expr::make_op(ExprKind::div, {coeff, part});
    out.coeff = coeff;
    return out;
}

// Rebuilds the flat term expression equal to the pattern.
inline ExprPtr pattern_expr(const TermPattern& pat) {
    ExprPtr e = pat.coeff;
    if (!pat.xpow.is_zero()) {
        ExprPtr xp = Expr::make_op(
            ExprKind::pow, {Expr::make_name(ExprKind::variable, pat.xvar),
                            detail::lin_to_expr(pat.xpow, pat.nvar)});
        e = Expr::make_op(ExprKind::mul, {e, xp});
    }
    for (const auto& f : pat.factors) {
        ExprPtr base = parse("1 - " + pat.xvar + "^" + std::to_string(f.base_exponent));
        ExprPtr fe = Expr::make_op(ExprKind::pow, {base, detail::lin_to_expr(f.outer, pat.nvar)});
        e = Expr::make_op(ExprKind::mul, {e, fe});
    }
    return e;
}

// ---------------------------------------------------------------------------
// Rules.

inline TermPattern apply_rule(const TermPattern& s, const TransformRule& rule, long n0 = 0) {
    TermPattern r = s;
    auto mul_coeff = [&](const std::string& factor) {
        r.coeff = Expr::make_op(ExprKind::mul, {r.coeff, parse(factor)});
    };
    switch (rule.kind) {
        case RuleKind::multiply_xpow:
            r.xpow = r.xpow + LinForm{Rat(0), Rat(rule.k)};
            return r;
        case RuleKind::substitute_x_sq:
            r.xpow = r.xpow.scaled(Rat(2));
            for (auto& f : r.factors) f.base_exponent *= 2;
            return r;
        case RuleKind::integrate_0x: {
            if (!r.factors.empty())
                throw domain_error("integrate_0x applies to pure x-power terms only");
            r.xpow = r.xpow + LinForm{Rat(0), Rat(1)};
            if (r.xpow.p.sign() < 0 || r.xpow.at(n0).sign() <= 0)
                throw domain_error("integrate_0x needs a positive resulting exponent");
            mul_coeff("1/" + r.xpow.str(r.nvar));
            return r;
        }
        case RuleKind::wallis: {
            if (!r.factors.empty())
                throw domain_error("wallis rule applies to pure x-power terms only");
            Rat two(2);
            LinForm m{r.xpow.p / two, r.xpow.q / two};
            if (!m.p.is_integer() || !m.q.is_integer())
                throw domain_error("wallis rule needs exponent of the form 2*p'*n + 2*q'");
            if (m.p.sign() < 0 || m.at(n0).sign() < 0)
                throw domain_error("wallis rule needs a nonnegative even exponent");
            std::string ms = m.str(r.nvar);
            mul_coeff("(pi/2) * pochhammer(1/2, " + ms + ") / fact(" + ms + ")");
            r.xpow = LinForm{};
            return r;
        }
        case RuleKind::x_sin_pi: {
            if (!r.factors.empty())
                throw domain_error("x_sin_pi rule applies to pure x-power terms only");
            const LinForm& m = r.xpow;
            if (!m.p.is_integer() || !m.q.is_integer() || m.p.sign() < 0 || m.at(n0).sign() < 0)
                throw domain_error("x_sin_pi rule needs a nonnegative integer exponent");
            std::string ms = m.str(r.nvar);
            mul_coeff("pi^(3/2) * gamma((" + ms + " + 1)/2) / (2*gamma(1 + " + ms + "/2))");
            r.xpow = LinForm{};
            return r;
        }
        case RuleKind::beta_01: {
            if (r.factors.size() > 1)
                throw domain_error("beta_01 rule needs x-dependence x^A * (1-x^B)^C");
            LinForm A = r.xpow;
            long B = 1;
            LinForm C{};
            if (!r.factors.empty()) {
                B = r.factors[0].base_exponent;
                C = r.factors[0].outer;
            }
            if (A.p.sign() < 0 || (A.at(n0) + Rat(1)).sign() <= 0)
                throw domain_error("beta_01 rule needs Re(A) + 1 > 0 for all n >= n0");
            if (C.p.sign() < 0 || (C.at(n0) + Rat(1)).sign() <= 0)
                throw domain_error("beta_01 rule needs Re(C) + 1 > 0 for all n >= n0");
            LinForm Ashift{A.p / Rat(B), (A.q + Rat(1)) / Rat(B)}; // (A+1)/B
            LinForm C1{C.p, C.q + Rat(1)};                          // C+1
            LinForm S = Ashift + C1;                                // (A+1)/B + C + 1
            std::string nv = r.nvar;
            mul_coeff("gamma(" + Ashift.str(nv) + ") * gamma(" + C1.str(nv) + ") / (" +
                      std::to_string(B) + " * gamma(" + S.str(nv) + "))");
            r.xpow = LinForm{};
            r.factors.clear();
            return r;
        }
    }
    throw usage_error("unknown rule");
}

// Folds a rule chain over a seed series; the result carries the flat term.
inline SeriesSpec derive_chain(const SeriesSpec& seed, const std::vector<TransformRule>& chain,
                               const std::string& xvar = "x") {
    TermPattern pat = pattern_of(seed.term, seed.var, xvar);
    for (std::size_t i = 0; i < chain.size(); ++i) {
        try {
            pat = apply_rule(pat, chain[i], seed.start);
        } catch (const std::exception& e) {
            throw domain_error("chain step " + std::to_string(i + 1) + " (" +
                               chain[i].str() + ") failed: " + e.what());
        }
    }
    SeriesSpec out;
    out.start = seed.start;
    out.var = seed.var;
    out.term = pattern_expr(pat);
    return out;
}

// Max relative deviation between two term expressions over an index range and
// a set of parameter bindings.
inline Real compare_termwise(const SeriesSpec& a, const SeriesSpec& b, long n_from, long n_to,
                             const std::vector<Bindings>& samples, const EvalContext& ctx) {
    mpfr_prec_t p = ctx.prec();
    Real maxdev(0, p);
    std::vector<Bindings> use = samples.empty() ? std::vector<Bindings>{Bindings{}} : samples;
    for (const auto& sample : use) {
        Bindings ba = sample, bb = sample;
        for (long n = n_from; n <= n_to; ++n) {
            ba.set_exact(a.var, Rat(n), ctx);
            bb.set_exact(b.var, Rat(n), ctx);
            Complex va = eval(a.term, ba, ctx);
            Complex vb = eval(b.term, bb, ctx);
            Real scale = abs(va);
            if (abs(vb) > scale) scale = abs(vb);
            if (scale.is_zero()) continue;
            Real dev = abs(va - vb) / scale;
            if (dev > maxdev) maxdev = dev;
        }
    }
    return maxdev;
}

} // namespace clausen
