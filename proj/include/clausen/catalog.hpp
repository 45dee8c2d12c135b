#pragma once

// Identity catalog: record model, the line-oriented catalog file format,
// verification strategies (series / integral / pfq / chain) and report
// emission. Catalog grammar: a block starts with `[identity <id>]`, followed
// by `key = value` lines; expressions are DSL strings in double quotes; lists
// are comma-separated in brackets; `#` starts a comment; a blank line ends
// the block.

#include "clausen/transform.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

namespace clausen {

struct IntegralSpec {
    ExprPtr integrand;
    std::string var = "x";
    ExprPtr from, to;
    std::vector<ExprPtr> split; // optional interior breakpoints
};

struct ChainSpec {
    std::string seed_id;
    std::vector<TransformRule> rules;
};

enum class EntryStatus { verified, audit };

struct IdentityRecord {
    std::string id;
    std::string paper_anchor;
    bool parametric = false;
    std::vector<std::string> params;
    std::vector<std::vector<Rat>> samples; // one row per sample point
    std::optional<SeriesSpec> lhs_series;
    std::optional<PFQSpec> lhs_pfq;
    std::optional<IntegralSpec> lhs_integral;
    ExprPtr prefactor;  // scales the pfq sum; null means 1
    ExprPtr rhs;
    EntryStatus expected_status = EntryStatus::verified;
    bool required = false;
    std::optional<ChainSpec> chain;

    int representation_count() const {
        return (lhs_series ? 1 : 0) + (lhs_pfq ? 1 : 0) + (lhs_integral ? 1 : 0);
    }
};

// ---------------------------------------------------------------------------
// Catalog file parsing.

namespace detail {

inline std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        else if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::string unquote(const std::string& v, long line_no) {
    if (v.size() < 2 || v.front() != '"' || v.back() != '"')
        throw usage_error("line " + std::to_string(line_no) + ": expected a quoted string");
    return v.substr(1, v.size() - 2);
}

inline std::vector<std::string> bracket_list(const std::string& v, long line_no) {
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw usage_error("line " + std::to_string(line_no) + ": expected a bracketed list");
    std::string body = v.substr(1, v.size() - 2);
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    bool quoted = false;
    for (char c : body) {
        if (c == '"') quoted = !quoted;
        if (!quoted) {
            if (c == '(' || c == '[') ++depth;
            if (c == ')' || c == ']') --depth;
            if (c == ',' && depth == 0) {
                out.push_back(trim(cur));
                cur.clear();
                continue;
            }
        }
        cur += c;
    }
    if (!trim(cur).empty()) out.push_back(trim(cur));
    return out;
}

inline ExprPtr parse_dsl(const std::string& text, long line_no) {
    try {
        return parse(text);
    } catch (const parse_error& e) {
        throw usage_error("line " + std::to_string(line_no) + ": " + e.what());
    }
}

inline Rat parse_rat(const std::string& text, long line_no) {
    // rationals in lists: integer, p/q, or decimal
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) return Rat::parse(trim(text));
        Rat num = Rat::parse(trim(text.substr(0, slash)));
        Rat den = Rat::parse(trim(text.substr(slash + 1)));
        return num / den;
    } catch (const std::exception& e) {
        throw usage_error("line " + std::to_string(line_no) + ": bad rational '" + text + "'");
    }
}

} // namespace detail

inline std::vector<IdentityRecord> load_catalog_text(const std::string& text) {
    std::vector<IdentityRecord> records;
    std::istringstream in(text);
    std::string raw;
    long line_no = 0;

    IdentityRecord cur;
    bool open = false;
    bool saw_kind_parametric = false;

    auto finish = [&]() {
        if (!open) return;
        if (!cur.rhs) throw usage_error("identity '" + cur.id + "' has no rhs");
        if (cur.representation_count() == 0 && !cur.chain)
            throw usage_error("identity '" + cur.id + "' has no lhs representation");
        if (cur.parametric && (cur.params.empty() || cur.samples.empty()))
            throw usage_error("identity '" + cur.id + "' is parametric but lacks params/samples");
        for (const auto& s : cur.samples)
            if (s.size() != cur.params.size())
                throw usage_error("identity '" + cur.id + "': sample arity mismatch");
        if (cur.required && cur.expected_status != EntryStatus::verified)
            throw usage_error("identity '" + cur.id + "': required entries must be verified-tier");
        for (const auto& r : records)
            if (r.id == cur.id) throw usage_error("duplicate identity id '" + cur.id + "'");
        records.push_back(cur);
        cur = IdentityRecord{};
        open = false;
        saw_kind_parametric = false;
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = detail::trim(detail::strip_comment(raw));
        if (line.empty()) {
            // a comment-only line does not end the block, a blank line does
            if (detail::trim(raw).empty()) finish();
            continue;
        }
        if (line.front() == '[') {
            finish();
            if (line.back() != ']')
                throw usage_error("line " + std::to_string(line_no) + ": malformed block header");
            std::string inner = detail::trim(line.substr(1, line.size() - 2));
            if (inner.rfind("identity ", 0) != 0)
                throw usage_error("line " + std::to_string(line_no) + ": expected [identity <id>]");
            cur.id = detail::trim(inner.substr(9));
            if (cur.id.empty())
                throw usage_error("line " + std::to_string(line_no) + ": empty identity id");
            open = true;
            continue;
        }
        if (!open)
            throw usage_error("line " + std::to_string(line_no) + ": key outside an identity block");
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = detail::trim(line.substr(0, eq));
        std::string val = detail::trim(line.substr(eq + 1));
        using detail::bracket_list;
        using detail::parse_dsl;
        using detail::parse_rat;
        using detail::unquote;

        if (key == "paper_anchor") cur.paper_anchor = unquote(val, line_no);
        else if (key == "kind") {
            if (val == "parametric") { cur.parametric = true; saw_kind_parametric = true; }
            else if (val == "constant") cur.parametric = false;
            else throw usage_error("line " + std::to_string(line_no) + ": kind must be constant|parametric");
        }
        else if (key == "required") cur.required = (val == "true");
        else if (key == "expected_status") {
            if (val == "verified") cur.expected_status = EntryStatus::verified;
            else if (val == "audit") cur.expected_status = EntryStatus::audit;
            else throw usage_error("line " + std::to_string(line_no) + ": expected_status must be verified|audit");
        }
        else if (key == "params") {
            for (auto& t : bracket_list(val, line_no)) cur.params.push_back(t);
        }
        else if (key == "sample") {
            std::vector<Rat> row;
            for (auto& t : bracket_list(val, line_no)) row.push_back(parse_rat(t, line_no));
            cur.samples.push_back(std::move(row));
        }
        else if (key == "series_term") {
            if (!cur.lhs_series) cur.lhs_series.emplace();
            cur.lhs_series->term = parse_dsl(unquote(val, line_no), line_no);
        }
        else if (key == "series_start") {
            if (!cur.lhs_series) cur.lhs_series.emplace();
            cur.lhs_series->start = std::stol(val);
        }
        else if (key == "series_var") {
            if (!cur.lhs_series) cur.lhs_series.emplace();
            cur.lhs_series->var = val;
        }
        else if (key == "pfq_tops") {
            if (!cur.lhs_pfq) cur.lhs_pfq.emplace();
            for (auto& t : bracket_list(val, line_no)) cur.lhs_pfq->tops.push_back(parse_rat(t, line_no));
        }
        else if (key == "pfq_bottoms") {
            if (!cur.lhs_pfq) cur.lhs_pfq.emplace();
            for (auto& t : bracket_list(val, line_no)) cur.lhs_pfq->bottoms.push_back(parse_rat(t, line_no));
        }
        else if (key == "pfq_z") {
            if (!cur.lhs_pfq) cur.lhs_pfq.emplace();
            cur.lhs_pfq->z = parse_dsl(unquote(val, line_no), line_no);
        }
        else if (key == "prefactor") cur.prefactor = parse_dsl(unquote(val, line_no), line_no);
        else if (key == "integrand") {
            if (!cur.lhs_integral) cur.lhs_integral.emplace();
            cur.lhs_integral->integrand = parse_dsl(unquote(val, line_no), line_no);
        }
        else if (key == "integral_var") {
            if (!cur.lhs_integral) cur.lhs_integral.emplace();
            cur.lhs_integral->var = val;
        }
        else if (key == "integral_from") {
            if (!cur.lhs_integral) cur.lhs_integral.emplace();
            cur.lhs_integral->from = parse_dsl(unquote(val, line_no), line_no);
        }
        else if (key == "integral_to") {
            if (!cur.lhs_integral) cur.lhs_integral.emplace();
            cur.lhs_integral->to = parse_dsl(unquote(val, line_no), line_no);
        }
        else if (key == "integral_split") {
            if (!cur.lhs_integral) cur.lhs_integral.emplace();
            for (auto& t : bracket_list(val, line_no))
                cur.lhs_integral->split.push_back(parse_dsl(unquote(t, line_no), line_no));
        }
        else if (key == "rhs") cur.rhs = parse_dsl(unquote(val, line_no), line_no);
        else if (key == "chain_seed") {
            if (!cur.chain) cur.chain.emplace();
            cur.chain->seed_id = val;
        }
        else if (key == "chain_rules") {
            if (!cur.chain) cur.chain.emplace();
            for (auto& t : bracket_list(val, line_no))
                cur.chain->rules.push_back(TransformRule::parse(t));
        }
        else throw usage_error("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    finish();
    (void)saw_kind_parametric;
    return records;
}

inline std::vector<IdentityRecord> load_catalog(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw usage_error("cannot open catalog file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_catalog_text(ss.str());
}

// ---------------------------------------------------------------------------
// Verification.

enum class Strategy { auto_pick, series, integral, pfq, chain };

inline const char* to_string(Strategy s) {
    switch (s) {
        case Strategy::series: return "series";
        case Strategy::integral: return "integral";
        case Strategy::pfq: return "pfq";
        case Strategy::chain: return "chain";
        default: return "auto";
    }
}

inline Strategy strategy_from_string(const std::string& s) {
    if (s == "auto") return Strategy::auto_pick;
    if (s == "series") return Strategy::series;
    if (s == "integral") return Strategy::integral;
    if (s == "pfq") return Strategy::pfq;
    if (s == "chain") return Strategy::chain;
    throw usage_error("unknown strategy: " + s);
}

enum class VerifyStatus { match, mismatch, error };

inline const char* to_string(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::match: return "match";
        case VerifyStatus::mismatch: return "mismatch";
        default: return "error";
    }
}

struct SampleOutcome {
    std::string binding;
    VerifyStatus status = VerifyStatus::error;
    long digits = 0;
};

struct VerifyReport {
    std::string id;
    VerifyStatus status = VerifyStatus::error;
    long digits_matched = 0;
    Strategy strategy = Strategy::auto_pick;
    long wall_ms = 0;
    bool required = false;
    EntryStatus tier = EntryStatus::verified;
    std::vector<SampleOutcome> sample_results;
    std::string detail;
};

struct LhsValue {
    Complex value;
    long achieved_digits;
};

namespace detail {

// Decide direct summation vs acceleration from an empirical ratio probe.
inline bool probe_geometric(const SeriesSpec& s, const Bindings& b, const EvalContext& ctx) {
    Bindings local = b;
    auto term_abs = [&](long n) {
        local.set_exact(s.var, Rat(n), ctx);
        return abs(eval(s.term, local, ctx));
    };
    auto ratio_at = [&](long n) -> double {
        Real a0 = term_abs(n), a1 = term_abs(n + 1);
        if (a0.is_zero()) return 0.0;
        return (a1 / a0).to_double();
    };
    double r31 = ratio_at(s.start + 31);
    double r64 = ratio_at(s.start + 64);
    if (r64 >= 0.995) return false;
    if (r64 - r31 > 0.004) return false; // ratio drifting towards 1: algebraic tail
    return true;
}

inline LhsValue lhs_series_value(const IdentityRecord& rec, const Bindings& b,
                                 const EvalContext& ctx) {
    const SeriesSpec& s = *rec.lhs_series;
    if (probe_geometric(s, b, ctx)) {
        SumResult r = series_sum_direct(s, b, ctx);
        return {r.value, r.achieved_digits};
    }
    SumResult r = series_sum_accelerated(s, b, ctx);
    return {r.value, r.achieved_digits};
}

inline LhsValue lhs_pfq_value(const IdentityRecord& rec, const Bindings& b,
                              const EvalContext& ctx) {
    SumResult r = pfq_sum(*rec.lhs_pfq, ctx, b);
    Complex v = r.value;
    if (rec.prefactor) v *= eval(rec.prefactor, b, ctx);
    return {v, r.achieved_digits};
}

inline LhsValue lhs_integral_value(const IdentityRecord& rec, const Bindings& b,
                                   const EvalContext& ctx) {
    const IntegralSpec& spec = *rec.lhs_integral;
    QuadResult r = spec.split.empty()
        ? integrate(spec.integrand, spec.var, spec.from, spec.to, b, ctx)
        : integrate_split(spec.integrand, spec.var, spec.from, spec.to, spec.split, b, ctx);
    return {r.value, r.reported_digits};
}

} // namespace detail

// Evaluates one lhs representation under a sample binding.
inline LhsValue evaluate_lhs(const IdentityRecord& rec, Strategy strategy, const Bindings& b,
                             const EvalContext& ctx) {
    switch (strategy) {
        case Strategy::series:
            if (!rec.lhs_series) throw usage_error(rec.id + ": no series representation");
            return detail::lhs_series_value(rec, b, ctx);
        case Strategy::pfq:
            if (!rec.lhs_pfq) throw usage_error(rec.id + ": no pfq representation");
            return detail::lhs_pfq_value(rec, b, ctx);
        case Strategy::integral:
            if (!rec.lhs_integral) throw usage_error(rec.id + ": no integral representation");
            return detail::lhs_integral_value(rec, b, ctx);
        default:
            throw usage_error("evaluate_lhs requires a concrete strategy");
    }
}

inline Strategy pick_strategy(const IdentityRecord& rec, Strategy requested) {
    if (requested != Strategy::auto_pick) return requested;
    if (rec.lhs_integral) return Strategy::integral;
    if (rec.lhs_pfq) return Strategy::pfq;
    if (rec.lhs_series) return Strategy::series;
    if (rec.chain) return Strategy::chain;
    throw usage_error(rec.id + ": no representation to verify");
}

inline Bindings sample_bindings(const IdentityRecord& rec, std::size_t idx,
                                const EvalContext& ctx) {
    Bindings b;
    if (!rec.parametric) return b;
    const auto& row = rec.samples.at(idx);
    for (std::size_t i = 0; i < rec.params.size(); ++i)
        b.set_exact(rec.params[i], row[i], ctx);
    return b;
}

inline std::string sample_label(const IdentityRecord& rec, std::size_t idx) {
    if (!rec.parametric) return "";
    std::string s;
    const auto& row = rec.samples.at(idx);
    for (std::size_t i = 0; i < rec.params.size(); ++i) {
        if (i) s += ",";
        s += rec.params[i] + "=" + row[i].str();
    }
    return s;
}

// Compares an lhs value against the rhs closed form; digits are capped by the
// weaker side's achieved precision.
inline SampleOutcome judge(const Complex& lhs, long lhs_achieved, const Complex& rhs,
                           const EvalContext& ctx, const std::string& label) {
    SampleOutcome out;
    out.binding = label;
    Real diff = abs(lhs - rhs);
    Real scale = abs(lhs);
    if (abs(rhs) > scale) scale = abs(rhs);
    long cap = std::min(lhs_achieved, ctx.target_digits());
    long raw;
    if (diff.is_zero() || scale.is_zero())
        raw = 1000000;
    else
        raw = -exponent10(diff / scale);
    out.digits = std::max(0L, std::min(raw, cap));
    out.status = (raw >= cap - 3) ? VerifyStatus::match : VerifyStatus::mismatch;
    return out;
}

inline VerifyReport verify_identity(const std::vector<IdentityRecord>& all,
                                    const IdentityRecord& rec, Strategy requested,
                                    const EvalContext& ctx) {
    auto t0 = std::chrono::steady_clock::now();
    VerifyReport rep;
    rep.id = rec.id;
    rep.required = rec.required;
    rep.tier = rec.expected_status;
    Strategy strat = Strategy::auto_pick;
    try {
        strat = pick_strategy(rec, requested);
        rep.strategy = strat;
        std::size_t nsamples = rec.parametric ? rec.samples.size() : 1;

        if (strat == Strategy::chain) {
            if (!rec.chain) throw usage_error(rec.id + ": no chain");
            if (!rec.lhs_series) throw usage_error(rec.id + ": chain strategy needs a series");
            auto seed_it = std::find_if(all.begin(), all.end(), [&](const IdentityRecord& r) {
                return r.id == rec.chain->seed_id;
            });
            if (seed_it == all.end() || !seed_it->lhs_series)
                throw usage_error(rec.id + ": chain seed '" + rec.chain->seed_id + "' not found");
            SeriesSpec derived = derive_chain(*seed_it->lhs_series, rec.chain->rules,
                                              rec.lhs_integral ? rec.lhs_integral->var : "x");
            std::vector<Bindings> sb;
            for (std::size_t i = 0; i < nsamples; ++i) sb.push_back(sample_bindings(rec, i, ctx));
            Real dev = compare_termwise(derived, *rec.lhs_series, rec.lhs_series->start,
                                        rec.lhs_series->start + 50, sb, ctx);
            Real replay_tol = pow_si(Real(10, ctx.prec()), -(ctx.target_digits() - 10));
            if (!(dev < replay_tol))
                throw convergence_error(rec.id + ": chain replay deviates from the stated series");
        }

        for (std::size_t i = 0; i < nsamples; ++i) {
            Bindings b = sample_bindings(rec, i, ctx);
            std::string label = sample_label(rec, i);
            try {
                LhsValue lhs = (strat == Strategy::chain)
                    ? detail::lhs_series_value(rec, b, ctx)
                    : evaluate_lhs(rec, strat, b, ctx);
                Complex rhs = eval(rec.rhs, b, ctx);
                rep.sample_results.push_back(judge(lhs.value, lhs.achieved_digits, rhs, ctx, label));
            } catch (const std::exception& e) {
                SampleOutcome bad;
                bad.binding = label;
                bad.status = VerifyStatus::error;
                bad.digits = 0;
                rep.sample_results.push_back(bad);
                rep.detail = e.what();
            }
        }

        bool any_error = false, any_mismatch = false;
        long worst = 1000000;
        for (const auto& s : rep.sample_results) {
            any_error = any_error || s.status == VerifyStatus::error;
            any_mismatch = any_mismatch || s.status == VerifyStatus::mismatch;
            worst = std::min(worst, s.digits);
        }
        rep.digits_matched = rep.sample_results.empty() ? 0 : worst;
        rep.status = any_error ? VerifyStatus::error
                   : any_mismatch ? VerifyStatus::mismatch : VerifyStatus::match;
    } catch (const std::exception& e) {
        rep.status = VerifyStatus::error;
        rep.digits_matched = 0;
        rep.detail = e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    return rep;
}

// Verifies a subset of records concurrently; the report order is by id no
// matter how work is scheduled.
inline std::vector<VerifyReport> verify_all(const std::vector<IdentityRecord>& all,
                                            std::vector<const IdentityRecord*> selected,
                                            Strategy strategy, const EvalContext& ctx,
                                            unsigned jobs = 1) {
    std::sort(selected.begin(), selected.end(),
              [](const IdentityRecord* a, const IdentityRecord* b) { return a->id < b->id; });
    std::vector<VerifyReport> reports(selected.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < selected.size(); ++i)
            reports[i] = verify_identity(all, *selected[i], strategy, ctx);
        return reports;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= selected.size()) return;
            reports[i] = verify_identity(all, *selected[i], strategy, ctx);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return reports;
}

// ---------------------------------------------------------------------------
// Reports.

inline std::string emit_report(const std::vector<VerifyReport>& reports,
                               const std::string& format) {
    std::ostringstream out;
    if (format == "lines") {
        for (const auto& r : reports)
            out << r.id << " " << to_string(r.status) << " " << r.digits_matched << " "
                << to_string(r.strategy) << " " << r.wall_ms << "ms\n";
        return out.str();
    }
    if (format != "table") throw usage_error("unknown report format: " + format);
    out << "id                        status    digits  strategy  tier      time\n";
    for (const auto& r : reports) {
        std::string id = r.id;
        if (id.size() < 25) id += std::string(25 - id.size(), ' ');
        std::string st = to_string(r.status);
        if (st.size() < 9) st += std::string(9 - st.size(), ' ');
        std::string dg = std::to_string(r.digits_matched);
        if (dg.size() < 7) dg += std::string(7 - dg.size(), ' ');
        std::string sg = to_string(r.strategy);
        if (sg.size() < 9) sg += std::string(9 - sg.size(), ' ');
        std::string tier = r.tier == EntryStatus::audit ? "audit" : "verified";
        if (tier.size() < 9) tier += std::string(9 - tier.size(), ' ');
        out << id << " " << st << " " << dg << " " << sg << " " << tier << " "
            << r.wall_ms << "ms\n";
    }
    return out.str();
}

} // namespace clausen
