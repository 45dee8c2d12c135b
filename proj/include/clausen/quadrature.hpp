#pragma once

// tanh-sinh quadrature over finite intervals. Nodes and weights are cached
// per (precision, level); abscissae are stored as distance from the endpoint
// so integrable endpoint singularities keep full accuracy.

#include "clausen/expr.hpp"

#include <cmath>
#include <map>
#include <shared_mutex>
#include <vector>

namespace clausen {

struct QuadResult {
    Complex value;
    Real error_estimate;   // relative level-to-level difference
    long levels_used = 0;
    long evaluations = 0;
    long reported_digits = 0;
};

namespace detail {

struct TSNode {
    Real complement; // 1 - x(t), in (0, 1]
    Real weight;     // w(t)
};

// Nodes introduced at `level` (spacing h = 2^-level; level 0 holds all the
// integer abscissae t = 1, 2, ..., later levels odd multiples of h only).
// t = 0 is handled separately by the caller.
inline const std::vector<TSNode>& ts_level_nodes(mpfr_prec_t prec, int level) {
    static std::map<std::pair<mpfr_prec_t, int>, std::vector<TSNode>> cache;
    static std::shared_mutex mu;
    auto key = std::make_pair(prec, level);
    {
        std::shared_lock<std::shared_mutex> rlock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::unique_lock<std::shared_mutex> wlock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    Real pi_half(prec);
    mpfr_const_pi(pi_half.raw(), MPFR_RNDN);
    pi_half = pi_half / Real(2, prec);
    // complement underflows (relative to prec) once (pi/2) sinh(t) exceeds prec*ln2
    double t_max = std::asinh(((double)prec + 24.0) * 0.6931471805599453 / 1.5707963267948966);

    std::vector<TSNode> nodes;
    double h = std::pow(0.5, level);
    long jstep = level == 0 ? 1 : 2;
    for (long j = 1; (double)j * h <= t_max; j += jstep) {
        Real t = Real(j, prec) * real_from_double(h, prec);
        Real sh = sinh(t), ch = cosh(t);
        Real u = pi_half * sh;
        // 1 - tanh(u) = 2 / (1 + e^{2u});  w = (pi/2) cosh(t) / cosh^2(u)
        Real e2u = exp(u * Real(2, prec));
        Real comp = Real(2, prec) / (Real(1, prec) + e2u);
        Real cu = cosh(u);
        Real w = pi_half * ch / (cu * cu);
        nodes.push_back(TSNode{comp, w});
    }
    auto pos = cache.emplace(key, std::move(nodes)).first;
    return pos->second;
}

inline Real ts_center_weight(mpfr_prec_t prec) {
    Real w(prec);
    mpfr_const_pi(w.raw(), MPFR_RNDN);
    return w / Real(2, prec);
}

inline QuadResult integrate_panel(const ExprPtr& integrand, const std::string& var,
                                  const Real& a, const Real& b, const Bindings& bindings,
                                  const EvalContext& ctx, int max_level) {
    mpfr_prec_t p = ctx.prec();
    if (!a.finite() || !b.finite()) throw usage_error("integration bounds must be finite reals");
    if (!(a < b)) throw usage_error("integration requires a < b");

    Real half = (b - a) / Real(2, p);
    Real mid = (a + b) / Real(2, p);

    Bindings local = bindings;
    long evals = 0;
    auto f = [&](const Real& u) {
        local.set(var, Complex(u));
        ++evals;
        Complex v = eval(integrand, local, ctx);
        if (!v.finite()) throw domain_error("non-finite interior sample");
        return v;
    };

    Complex s = ts_center_weight(p) * f(mid);
    Complex prev_integral(0, p);
    Real err(1, p);
    Real tol = ctx.tol() / Real(100, p);
    long level_used = 0;
    bool converged = false;

    for (int level = 0; level <= max_level; ++level) {
        const auto& nodes = ts_level_nodes(p, level);
        for (const auto& nd : nodes) {
            Real du = half * nd.complement;
            s += nd.weight * (f(a + du) + f(b - du));
        }
        Real h = ldexp(Real(1, p), -level);
        Complex integral = Complex(h * half) * s;
        level_used = level;
        if (level >= 2) {
            Real diff = abs(integral - prev_integral);
            Real scale = abs(integral);
            if (scale.is_zero()) scale = Real(1, p);
            err = diff / scale;
            if (err < tol) {
                prev_integral = integral;
                converged = true;
                break;
            }
        }
        prev_integral = integral;
    }

    if (!converged)
        throw convergence_error("tanh-sinh did not converge by the maximum level");

    long digits = -exponent10(err) - 2;
    if (digits < 0) digits = 0;
    if (digits > ctx.target_digits()) digits = ctx.target_digits();
    return QuadResult{prev_integral, err, level_used, evals, digits};
}

} // namespace detail

// Integrates `integrand` in `var` over [a, b] (finite reals, a < b).
inline QuadResult integrate(const ExprPtr& integrand, const std::string& var,
                            const ExprPtr& a_expr, const ExprPtr& b_expr,
                            const Bindings& bindings, const EvalContext& ctx,
                            int max_level = 12) {
    Complex ac = eval(a_expr, bindings, ctx);
    Complex bc = eval(b_expr, bindings, ctx);
    if (!ac.is_real() || !bc.is_real())
        throw usage_error("integration bounds must be finite reals");
    return detail::integrate_panel(integrand, var, ac.re(), bc.re(), bindings, ctx, max_level);
}

// Splits [a, b] at interior breakpoints (sorted, strictly inside) and sums
// the panel integrals; for integrands with interior kinks.
inline QuadResult integrate_split(const ExprPtr& integrand, const std::string& var,
                                  const ExprPtr& a_expr, const ExprPtr& b_expr,
                                  const std::vector<ExprPtr>& breakpoints,
                                  const Bindings& bindings, const EvalContext& ctx,
                                  int max_level = 12) {
    mpfr_prec_t p = ctx.prec();
    std::vector<Real> cuts;
    auto push_real = [&](const ExprPtr& e) {
        Complex v = eval(e, bindings, ctx);
        if (!v.is_real() || !v.finite()) throw usage_error("breakpoints must be finite reals");
        cuts.push_back(v.re());
    };
    push_real(a_expr);
    for (const auto& bp : breakpoints) push_real(bp);
    push_real(b_expr);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        if (!(cuts[i] < cuts[i + 1]))
            throw usage_error("breakpoints must be strictly increasing inside (a, b)");

    Complex total(0, p);
    Real err(0, p);
    long levels = 0, evals = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        QuadResult r = detail::integrate_panel(integrand, var, cuts[i], cuts[i + 1],
                                               bindings, ctx, max_level);
        total += r.value;
        err += r.error_estimate;
        levels = std::max(levels, r.levels_used);
        evals += r.evaluations;
    }
    long digits = err.is_zero() ? ctx.target_digits() : -exponent10(err) - 2;
    if (digits < 0) digits = 0;
    if (digits > ctx.target_digits()) digits = ctx.target_digits();
    return QuadResult{total, err, levels, evals, digits};
}

} // namespace clausen
