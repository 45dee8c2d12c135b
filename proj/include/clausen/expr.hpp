#pragma once

// Shared expression language for series terms, integrands and closed forms.
// One grammar; rationals stay exact until numeric evaluation; integer-valued
// combinatorics (fact, dfact, binom, pochhammer, harmonic, altharmonic) are
// computed exactly and only then rounded.

#include "clausen/special.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace clausen {

enum class ExprKind { number, constant, variable, neg, add, sub, mul, div, pow, call };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind;
    Rat number;                 // number
    std::string name;           // constant / variable / call
    std::vector<ExprPtr> args;  // operands

    static ExprPtr make_number(Rat v) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::number;
        e->number = std::move(v);
        return e;
    }
    static ExprPtr make_name(ExprKind k, std::string n) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->name = std::move(n);
        return e;
    }
    static ExprPtr make_op(ExprKind k, std::vector<ExprPtr> a) {
        // fold rational literals so that "-1/2" is a single exact number
        if (k == ExprKind::neg && a[0]->kind == ExprKind::number)
            return make_number(-a[0]->number);
        if (k == ExprKind::div && a[0]->kind == ExprKind::number &&
            a[1]->kind == ExprKind::number && !a[1]->number.is_zero())
            return make_number(a[0]->number / a[1]->number);
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->args = std::move(a);
        return e;
    }
    static ExprPtr make_call(std::string n, std::vector<ExprPtr> a) {
        auto e = std::make_shared<Expr>();
        e->kind = ExprKind::call;
        e->name = std::move(n);
        e->args = std::move(a);
        return e;
    }
};

inline bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case ExprKind::number: return a->number == b->number;
        case ExprKind::constant:
        case ExprKind::variable: return a->name == b->name;
        default: break;
    }
    if (a->name != b->name || a->args.size() != b->args.size()) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!expr_equal(a->args[i], b->args[i])) return false;
    return true;
}

// name -> arity for every function the grammar accepts
inline const std::map<std::string, int>& function_table() {
    static const std::map<std::string, int> tab = {
        {"fact", 1},   {"dfact", 1},     {"binom", 2},    {"pochhammer", 2},
        {"harmonic", 1}, {"altharmonic", 1},
        {"gamma", 1},  {"digamma", 1},   {"zeta", 1},     {"polylog", 2},
        {"lerch", 3},
        {"exp", 1},    {"ln", 1},        {"log", 1},      {"sqrt", 1},
        {"sin", 1},    {"cos", 1},       {"tan", 1},      {"csc", 1},
        {"sec", 1},    {"cot", 1},
        {"asin", 1},   {"acos", 1},      {"atan", 1},     {"acot", 1},
        {"acsc", 1},   {"asec", 1},
        {"sinh", 1},   {"cosh", 1},      {"tanh", 1},     {"coth", 1},
        {"asinh", 1},  {"acosh", 1},     {"atanh", 1},    {"acoth", 1},
        {"re", 1},     {"im", 1},        {"abs", 1},
    };
    return tab;
}

// ---------------------------------------------------------------------------
// Parser (recursive descent).

namespace detail {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    ExprPtr parse() {
        skip_ws();
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    bool eat(char c) {
        skip_ws();
        if (peek() == c) { ++pos_; return true; }
        return false;
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_product();
        for (;;) {
            skip_ws();
            if (eat('+')) e = Expr::make_op(ExprKind::add, {e, parse_product()});
            else if (eat('-')) e = Expr::make_op(ExprKind::sub, {e, parse_product()});
            else return e;
        }
    }

    ExprPtr parse_product() {
        ExprPtr e = parse_unary();
        for (;;) {
            skip_ws();
            if (eat('*')) e = Expr::make_op(ExprKind::mul, {e, parse_unary()});
            else if (eat('/')) e = Expr::make_op(ExprKind::div, {e, parse_unary()});
            else return e;
        }
    }

    ExprPtr parse_unary() {
        skip_ws();
        if (eat('-')) return Expr::make_op(ExprKind::neg, {parse_unary()});
        if (eat('+')) return parse_unary();
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_atom();
        skip_ws();
        if (eat('^')) {
            // right associative; exponent may carry a sign
            ExprPtr e = parse_unary();
            return Expr::make_op(ExprKind::pow, {base, e});
        }
        return base;
    }

    ExprPtr parse_atom() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            skip_ws();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return parse_number();
        if (std::isalpha((unsigned char)c) || c == '_') return parse_name();
        fail("expected a number, name or '('");
    }

    ExprPtr parse_number() {
        std::size_t start = pos_;
        bool seen_dot = false;
        while (pos_ < s_.size() &&
               (std::isdigit((unsigned char)s_[pos_]) || (!seen_dot && s_[pos_] == '.'))) {
            if (s_[pos_] == '.') seen_dot = true;
            ++pos_;
        }
        std::string lit = s_.substr(start, pos_ - start);
        if (lit.empty() || lit == ".") { pos_ = start; fail("bad numeric literal"); }
        return Expr::make_number(Rat::parse(lit));
    }

    ExprPtr parse_name() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_')) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        skip_ws();
        if (peek() == '(') {
            auto it = function_table().find(name);
            if (it == function_table().end()) {
                pos_ = start;
                fail("unknown function name '" + name + "'");
            }
            ++pos_; // '('
            std::vector<ExprPtr> args;
            if (!eat(')')) {
                args.push_back(parse_sum());
                while (eat(',')) args.push_back(parse_sum());
                skip_ws();
                if (!eat(')')) fail("expected ')' or ',' in argument list");
            }
            if ((int)args.size() != it->second) {
                pos_ = start;
                fail("function '" + name + "' expects " + std::to_string(it->second) +
                     " argument(s), got " + std::to_string(args.size()));
            }
            return Expr::make_call(name, std::move(args));
        }
        if (is_const_name(name)) return Expr::make_name(ExprKind::constant, name);
        return Expr::make_name(ExprKind::variable, name);
    }
};

} // namespace detail

inline ExprPtr parse(const std::string& text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printer; parse(print(e)) is structurally equal to e.

namespace detail {

inline int prec_of(const Expr& e) {
    switch (e.kind) {
        case ExprKind::add:
        case ExprKind::sub: return 1;
        case ExprKind::mul:
        case ExprKind::div: return 2;
        case ExprKind::neg: return 3;
        case ExprKind::pow: return 4;
        case ExprKind::number:
            // a printed fraction "p/q" re-parses like a division, a negative
            // integer like a unary minus
            if (!e.number.is_integer()) return 2;
            return e.number.sign() < 0 ? 3 : 5;
        default: return 5;
    }
}

inline void print_rec(const Expr& e, std::string& out, int parent_prec, bool right_side) {
    int prec = prec_of(e);
    bool parens = prec < parent_prec || (prec == parent_prec && right_side && prec <= 2);
    if (parens) out += '(';
    switch (e.kind) {
        case ExprKind::number: out += e.number.str(); break;
        case ExprKind::constant:
        case ExprKind::variable: out += e.name; break;
        case ExprKind::neg:
            out += '-';
            print_rec(*e.args[0], out, 3, true);
            break;
        case ExprKind::add:
            print_rec(*e.args[0], out, 1, false);
            out += " + ";
            print_rec(*e.args[1], out, 1, true);
            break;
        case ExprKind::sub:
            print_rec(*e.args[0], out, 1, false);
            out += " - ";
            print_rec(*e.args[1], out, 1, true);
            break;
        case ExprKind::mul:
            print_rec(*e.args[0], out, 2, false);
            out += '*';
            print_rec(*e.args[1], out, 2, true);
            break;
        case ExprKind::div:
            print_rec(*e.args[0], out, 2, false);
            out += '/';
            print_rec(*e.args[1], out, 2, true);
            break;
        case ExprKind::pow:
            print_rec(*e.args[0], out, 5, false); // left operand of ^ must be atomic
            out += '^';
            print_rec(*e.args[1], out, 4, false); // right associative
            break;
        case ExprKind::call: {
            out += e.name;
            out += '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) out += ", ";
                print_rec(*e.args[i], out, 0, false);
            }
            out += ')';
            break;
        }
    }
    if (parens) out += ')';
}

} // namespace detail

inline std::string print(const ExprPtr& e) {
    std::string out;
    detail::print_rec(*e, out, 0, false);
    return out;
}

inline void collect_free_vars(const Expr& e, std::set<std::string>& out) {
    if (e.kind == ExprKind::variable) out.insert(e.name);
    for (const auto& a : e.args) collect_free_vars(*a, out);
}

inline std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> out;
    collect_free_vars(*e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Bindings & evaluation.

class Bindings {
public:
    void set(const std::string& name, Complex v) { numeric_.insert_or_assign(name, std::move(v)); exact_.erase(name); }
    void set_exact(const std::string& name, const Rat& v, const EvalContext& ctx) {
        numeric_.insert_or_assign(name, Complex(v, ctx.prec()));
        exact_.insert_or_assign(name, v);
    }
    const Complex* find(const std::string& name) const {
        auto it = numeric_.find(name);
        return it == numeric_.end() ? nullptr : &it->second;
    }
    const Rat* find_exact(const std::string& name) const {
        auto it = exact_.find(name);
        return it == exact_.end() ? nullptr : &it->second;
    }
    bool empty() const { return numeric_.empty(); }

private:
    std::map<std::string, Complex> numeric_;
    std::map<std::string, Rat> exact_;
};

namespace detail {

// Exact rational evaluation of a subtree, when the subtree stays inside
// rational arithmetic and exactly-known bindings.
inline std::optional<Rat> try_exact(const Expr& e, const Bindings& b) {
    switch (e.kind) {
        case ExprKind::number: return e.number;
        case ExprKind::variable: {
            if (const Rat* r = b.find_exact(e.name)) return *r;
            if (const Complex* v = b.find(e.name)) {
                if (v->is_real() && v->re().is_integer() &&
                    mpfr_fits_slong_p(v->re().raw(), MPFR_RNDN))
                    return Rat(v->re().to_long());
            }
            return std::nullopt;
        }
        case ExprKind::neg: {
            auto a = try_exact(*e.args[0], b);
            if (!a) return std::nullopt;
            return -*a;
        }
        case ExprKind::add:
        case ExprKind::sub:
        case ExprKind::mul:
        case ExprKind::div: {
            auto a = try_exact(*e.args[0], b);
            if (!a) return std::nullopt;
            auto c = try_exact(*e.args[1], b);
            if (!c) return std::nullopt;
            switch (e.kind) {
                case ExprKind::add: return *a + *c;
                case ExprKind::sub: return *a - *c;
                case ExprKind::mul: return *a * *c;
                default:
                    if (c->is_zero()) return std::nullopt; // let numeric path report it
                    return *a / *c;
            }
        }
        case ExprKind::pow: {
            auto a = try_exact(*e.args[0], b);
            if (!a) return std::nullopt;
            auto c = try_exact(*e.args[1], b);
            if (!c || !c->fits_long()) return std::nullopt;
            if (a->is_zero() && c->to_long() < 0) return std::nullopt;
            return a->pow_int(c->to_long());
        }
        case ExprKind::call: {
            const std::string& f = e.name;
            bool comb = f == "fact" || f == "dfact" || f == "binom" ||
                        f == "pochhammer" || f == "harmonic" || f == "altharmonic";
            if (!comb) return std::nullopt;
            std::vector<Rat> av;
            for (const auto& a : e.args) {
                auto r = try_exact(*a, b);
                if (!r) return std::nullopt;
                av.push_back(*r);
            }
            auto need_int = [&](const Rat& r) -> long {
                if (!r.fits_long())
                    throw domain_error(f + " requires a small integer argument");
                return r.to_long();
            };
            if (f == "fact") return rat_factorial(need_int(av[0]));
            if (f == "dfact") return rat_double_factorial(need_int(av[0]));
            if (f == "binom") return rat_binomial(need_int(av[0]), need_int(av[1]));
            if (f == "pochhammer") return rat_pochhammer(av[0], need_int(av[1]));
            if (f == "harmonic") return rat_harmonic(need_int(av[0]));
            return rat_alt_harmonic(need_int(av[0]));
        }
        default: return std::nullopt;
    }
}

} // namespace detail

inline Complex eval(const ExprPtr& e, const Bindings& b, const EvalContext& ctx);

namespace detail {

// Above this argument size, exact bignum combinatorics give way to the
// correctly rounded gamma route at working precision (same value after
// rounding, bounded cost).
constexpr long kExactCombinatoricsLimit = 256;

inline Real real_gamma(const Real& x) {
    Real r(x.prec());
    mpfr_gamma(r.raw(), x.raw(), MPFR_RNDN);
    if (!r.finite()) throw domain_error("gamma overflowed or hit a pole");
    return r;
}

inline Complex eval_call(const Expr& e, const Bindings& b, const EvalContext& ctx) {
    const std::string& f = e.name;
    mpfr_prec_t p = ctx.prec();

    // combinatorics: exact for moderate arguments, then embed
    if (f == "fact" || f == "dfact" || f == "binom" || f == "harmonic" ||
        f == "altharmonic" || f == "pochhammer") {
        std::vector<Rat> av;
        bool exact_args = true;
        for (const auto& a : e.args) {
            auto r = try_exact(*a, b);
            if (!r) { exact_args = false; break; }
            av.push_back(*r);
        }
        auto small = [&]() {
            for (const auto& r : av)
                if (r.is_integer() && (!r.fits_long() ||
                    std::abs(r.to_long()) > kExactCombinatoricsLimit))
                    return false;
            return true;
        };
        if (exact_args && small()) {
            if (auto r = try_exact(e, b)) return Complex(*r, p);
        }
        auto need_int = [&](std::size_t i) -> long {
            if (!exact_args || !av[i].fits_long())
                throw domain_error(f + " requires an exact integer argument");
            return av[i].to_long();
        };
        if (f == "fact") {
            long n = need_int(0);
            if (n < 0) throw domain_error("factorial of negative integer");
            return Complex(real_gamma(Real(n + 1, p)));
        }
        if (f == "dfact") {
            long n = need_int(0);
            if (n < -1) throw domain_error("double factorial of integer below -1");
            if (n <= 0) return Complex(1, p);
            if (n % 2 == 0) { // (2k)!! = 2^k k!
                long k = n / 2;
                return Complex(ldexp(real_gamma(Real(k + 1, p)), k));
            }
            long k = (n - 1) / 2; // (2k+1)!! = (2k+2)! / (2^{k+1} (k+1)!)
            Real num = real_gamma(Real(2 * k + 3, p));
            Real den = ldexp(real_gamma(Real(k + 2, p)), k + 1);
            return Complex(num / den);
        }
        if (f == "binom") {
            long n = need_int(0), k = need_int(1);
            if (k < 0 || n < 0 || k > n) throw domain_error("binomial outside 0 <= k <= n");
            Real num = real_gamma(Real(n + 1, p));
            return Complex(num / (real_gamma(Real(k + 1, p)) * real_gamma(Real(n - k + 1, p))));
        }
        if (f == "harmonic" || f == "altharmonic") {
            long m = need_int(0);
            if (m < 0) throw domain_error(f + " of negative index");
            Real acc(0, p);
            for (long j = 1; j <= m; ++j) {
                Real t = Real(1, p) / Real(j, p);
                if (f == "altharmonic" && j % 2 == 0) t = -t;
                acc += t;
            }
            return Complex(acc);
        }
        // pochhammer
        auto n = try_exact(*e.args[1], b);
        if (!n || !n->fits_long())
            throw domain_error("pochhammer count must be an exact integer");
        long cnt = n->to_long();
        if (cnt < 0) throw domain_error("pochhammer with negative count");
        if (exact_args && av[0].sign() > 0 && cnt > kExactCombinatoricsLimit) {
            Real base(av[0], p); // Gamma(a+n)/Gamma(a) for positive rational a
            return Complex(real_gamma(base + Real(cnt, p)) / real_gamma(base));
        }
        Complex base = eval(e.args[0], b, ctx);
        Complex acc(1, p);
        for (long k = 0; k < cnt; ++k) acc *= (base + Complex(k, p));
        return acc;
    }
    if (f == "gamma") return gamma(eval(e.args[0], b, ctx), ctx);
    if (f == "digamma") return digamma(eval(e.args[0], b, ctx), ctx);
    if (f == "zeta") {
        auto s = try_exact(*e.args[0], b);
        if (!s || !s->fits_long()) throw domain_error("zeta requires an exact integer argument");
        return Complex(zeta_int(s->to_long(), ctx));
    }
    if (f == "polylog") {
        auto s = try_exact(*e.args[0], b);
        if (!s || !s->fits_long()) throw domain_error("polylog order must be an exact integer");
        return polylog(s->to_long(), eval(e.args[1], b, ctx), ctx);
    }
    if (f == "lerch") {
        auto s = try_exact(*e.args[1], b);
        if (!s || !s->fits_long()) throw domain_error("lerch order must be an exact integer");
        return lerch_phi(eval(e.args[0], b, ctx), s->to_long(), eval(e.args[2], b, ctx), ctx);
    }
    return elementary(f, eval(e.args[0], b, ctx), ctx);
}

} // namespace detail

inline Complex eval(const ExprPtr& e, const Bindings& b, const EvalContext& ctx) {
    switch (e->kind) {
        case ExprKind::number: return Complex(e->number, ctx.prec());
        case ExprKind::constant: return const_value(e->name, ctx);
        case ExprKind::variable: {
            const Complex* v = b.find(e->name);
            if (!v) throw domain_error("unbound variable '" + e->name + "'");
            return *v;
        }
        case ExprKind::neg: return -eval(e->args[0], b, ctx);
        case ExprKind::add: return eval(e->args[0], b, ctx) + eval(e->args[1], b, ctx);
        case ExprKind::sub: return eval(e->args[0], b, ctx) - eval(e->args[1], b, ctx);
        case ExprKind::mul: return eval(e->args[0], b, ctx) * eval(e->args[1], b, ctx);
        case ExprKind::div: return eval(e->args[0], b, ctx) / eval(e->args[1], b, ctx);
        case ExprKind::pow: {
            // integer exponents go through exact repeated squaring so that
            // negative bases stay off the branch cut
            if (auto ex = detail::try_exact(*e->args[1], b)) {
                if (ex->fits_long())
                    return c_pow_int(eval(e->args[0], b, ctx), ex->to_long());
                Complex w(*ex, ctx.prec());
                return complex_pow(eval(e->args[0], b, ctx), w);
            }
            return complex_pow(eval(e->args[0], b, ctx), eval(e->args[1], b, ctx));
        }
        case ExprKind::call: {
            Complex r = detail::eval_call(*e, b, ctx);
            if (!r.finite()) throw domain_error("non-finite value from " + e->name);
            return r;
        }
    }
    throw domain_error("corrupt expression tree");
}

} // namespace clausen
