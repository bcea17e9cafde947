#pragma once

// Command-line front end. Everything lives in run() so the tests can drive it in-process;
// main.cpp only forwards argv and the streams.
//
// Exit codes: 0 success, 1 verification failure or module error, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diracs3/diracs3.hpp"

namespace diracs3::cli {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------------------------
// Number and flag parsing

namespace detail {

/// Parses an unsigned decimal literal "123.456" into mantissa * 10^-scale when it fits in 53 bits.
inline bool exact_decimal(std::string_view s, std::int64_t& mant, int& scale) {
    mant = 0;
    scale = 0;
    bool neg = false, dot = false, any = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = s[i++] == '-';
    for (; i < s.size(); ++i) {
        const char ch = s[i];
        if (ch == '.') {
            if (dot) return false;
            dot = true;
        } else if (ch >= '0' && ch <= '9') {
            any = true;
            if (mant > (std::int64_t{1} << 53) / 10) return false;
            mant = mant * 10 + (ch - '0');
            if (dot) ++scale;
        } else {
            return false;
        }
    }
    if (!any || mant > (std::int64_t{1} << 53)) return false;
    if (neg) mant = -mant;
    return true;
}

inline double parse_decimal(const std::string& s) {
    size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw UsageError("not a number: '" + s + "'");
    }
    if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
    return v;
}

inline std::string trim(std::string s) {
    const auto ws = " \t";
    s.erase(0, s.find_first_not_of(ws));
    s.erase(s.find_last_not_of(ws) + 1);
    return s;
}

} // namespace detail

/// Decimal or rational literal ("0.5", "1/2", "2.5e-1"). p/q with p and q exact decimals is
/// reduced to one division of integers, so "1/3" is the correctly rounded double.
inline double parse_real(const std::string& raw) {
    const std::string s = detail::trim(raw);
    const auto slash = s.find('/');
    if (slash == std::string::npos) return detail::parse_decimal(s);
    const std::string num = detail::trim(s.substr(0, slash)), den = detail::trim(s.substr(slash + 1));
    std::int64_t pm, qm;
    int ps, qs;
    if (detail::exact_decimal(num, pm, ps) && detail::exact_decimal(den, qm, qs)) {
        if (qm == 0) throw UsageError("zero denominator in '" + s + "'");
        // p/10^ps / (q/10^qs) = p 10^qs / (q 10^ps); scale the smaller side while it stays exact
        long double p = pm, q = qm;
        for (int i = 0; i < qs; ++i) p *= 10;
        for (int i = 0; i < ps; ++i) q *= 10;
        if (std::abs(p) <= 9007199254740992.0L && std::abs(q) <= 9007199254740992.0L)
            return static_cast<double>(p) / static_cast<double>(q);
        return static_cast<double>(p / q);
    }
    const double q = detail::parse_decimal(den);
    if (q == 0.0) throw UsageError("zero denominator in '" + s + "'");
    return detail::parse_decimal(num) / q;
}

inline Metric parse_metric(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_real(item));
    if (v.size() != 3) throw UsageError("--metric expects three comma-separated values a,b,c");
    try {
        return {v[0], v[1], v[2]};
    } catch (const Error& e) {
        throw UsageError(std::string("invalid metric: ") + e.what());
    }
}

struct GridAxis {
    double lo, hi;
    int count;
    [[nodiscard]] double at(int i) const { return count == 1 ? lo : lo + (hi - lo) * i / (count - 1); }
};

/// "lo:hi:n,lo:hi:n,lo:hi:n"
inline std::array<GridAxis, 3> parse_grid(const std::string& s) {
    std::array<GridAxis, 3> axes{};
    std::stringstream ss(s);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i == 3) throw UsageError("--grid expects three axes");
        std::stringstream is(item);
        std::string lo, hi, n;
        if (!std::getline(is, lo, ':') || !std::getline(is, hi, ':') || !std::getline(is, n, ':'))
            throw UsageError("grid axis must be lo:hi:count, got '" + item + "'");
        axes[i].lo = parse_real(lo);
        axes[i].hi = parse_real(hi);
        const double cnt = parse_real(n);
        if (!(cnt >= 1.0) || cnt != std::floor(cnt) || cnt > 10000) throw UsageError("grid count must be a positive integer");
        axes[i].count = static_cast<int>(cnt);
        if (!(axes[i].lo > 0.0) || !(axes[i].hi > 0.0)) throw UsageError("grid bounds must be positive");
        ++i;
    }
    if (i != 3) throw UsageError("--grid expects three axes");
    return axes;
}

/// Worker count from DIRAC_S3_THREADS; 1 when unset or invalid.
inline unsigned thread_count() {
    const char* v = std::getenv("DIRAC_S3_THREADS");
    if (!v) return 1;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (end == v || *end != '\0' || n < 1) return 1;
    return static_cast<unsigned>(std::min<long>(n, 256));
}

// ---------------------------------------------------------------------------------------------
// Output

/// %.17g for every float; non-finite values become null. Keys keep insertion order.
inline void write_json(const json& j, std::string& out, int depth = 0) {
    const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { out += "{}"; return; }
        out += "{\n";
        bool first = true;
        for (const auto& [k, v] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + json(k).dump() + ": ";
            write_json(v, out, depth + 1);
        }
        out += "\n" + close + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { out += "[]"; return; }
        out += "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            write_json(j[i], out, depth + 1);
        }
        out += "\n" + close + "]";
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) { out += "null"; return; }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        std::string s = buf;
        if (s.find_first_of(".en") == std::string::npos) s += ".0";
        out += s;
        return;
    }
    default: out += j.dump(); return;
    }
}

inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json metric_json(const Metric& m) { return json{{"a", m.a()}, {"b", m.b()}, {"c", m.c()}}; }

inline json check_json(const Check& c) {
    const char* rel = c.relation == Relation::Equal ? "=" : c.relation == Relation::Greater ? ">" : ">=";
    json j{{"step", c.step}};
    if (c.n >= 0) j["n"] = c.n;
    if (c.k >= 0) j["k"] = c.k;
    j["relation"] = rel;
    j["lhs"] = c.lhs;
    j["rhs"] = c.rhs;
    j["margin"] = c.margin;
    j["passed"] = c.passed;
    return j;
}

inline json error_json(const Error& e) {
    json j{{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    if (const auto* cf = dynamic_cast<const CheckFailure*>(&e)) {
        j["n"] = cf->level();
        j["k"] = cf->row();
    }
    return j;
}

// ---------------------------------------------------------------------------------------------
// Commands. Each returns the result payload and may lower the exit status.

struct Context {
    std::vector<std::string> argv; // echoed verbatim
    std::string command;
    std::optional<Metric> metric;
    std::optional<Manifold> manifold;
    unsigned threads = 1;
    int exit = kExitOk;
};

inline json cmd_spectrum(Context& ctx, int max_level, double merge_tol, bool with_merged) {
    AssembleOptions opts;
    opts.mergeTol = merge_tol;
    opts.threads = ctx.threads;
    const auto s = assemble(*ctx.metric, *ctx.manifold, max_level, opts);
    json lines = json::array();
    for (const auto& l : s.lines) {
        lines.push_back({{"eigenvalue", l.eigenvalue},
                         {"level", l.level},
                         {"block", std::string(to_string(l.tag))},
                         {"block_multiplicity", l.blockMultiplicity},
                         {"multiplicity", l.totalMultiplicity}});
    }
    json r{{"max_level", s.maxLevel}, {"merge_tolerance", s.mergeTolerance}, {"total_count", s.total_count()},
           {"lines", std::move(lines)}};
    if (with_merged) {
        json merged = json::array();
        for (const auto& m : s.merged())
            merged.push_back({{"eigenvalue", m.eigenvalue}, {"multiplicity", m.multiplicity}, {"levels", m.levels}});
        r["merged"] = std::move(merged);
    }
    return r;
}

inline std::string spectrum_csv(const Metric& m, Manifold manifold, int max_level, unsigned threads) {
    AssembleOptions opts;
    opts.threads = threads;
    const auto s = assemble(m, manifold, max_level, opts);
    std::string out = "eigenvalue,level,block,multiplicity\n";
    for (const auto& l : s.lines)
        out += format_real(l.eigenvalue) + "," + std::to_string(l.level) + "," + std::string(to_string(l.tag)) + "," +
               std::to_string(l.totalMultiplicity) + "\n";
    return out;
}

inline json cmd_smallest(Context& ctx, int max_level, Certification mode, int horizon, bool with_trace) {
    SmallestOptions opts;
    opts.maxLevel = max_level;
    opts.certification = mode;
    opts.horizon = horizon;
    const auto r = smallest(*ctx.metric, *ctx.manifold, opts);
    json j{{"value", r.value},
           {"multiplicity_of_D_squared", r.multiplicityOfDSquared},
           {"certified", r.certified},
           {"scal_sign", std::string(to_string(scal_sign(*ctx.metric)))},
           {"max_level_used", r.maxLevelUsed}};
    if (r.certificationTrace) {
        const auto& t = *r.certificationTrace;
        json tr{{"sorted_metric", metric_json(t.metric)},
                {"horizon", t.horizon},
                {"check_count", t.checks.size()},
                {"min_relative_margin", t.min_relative_margin()}};
        if (with_trace) {
            json checks = json::array();
            for (const auto& c : t.checks) checks.push_back(check_json(c));
            tr["checks"] = std::move(checks);
        }
        j["certification"] = std::move(tr);
    }
    return j;
}

inline json cmd_invariants(Context& ctx) {
    const Metric& m = *ctx.metric;
    const auto inv = invariants(m);
    const auto heat = heat_invariants(m, space_of(*ctx.manifold));
    return json{{"C", inv.C},
                {"mu", inv.mu},
                {"scal", inv.scal},
                {"scal_sign", std::string(to_string(scal_sign(m)))},
                {"volume_s3", inv.volS3},
                {"volume_so3", inv.volSO3},
                {"s", {inv.s1, inv.s2, inv.s3}},
                {"sigma", {inv.sigma1, inv.sigma2, inv.sigma3}},
                {"sectional", {{"K12", inv.K12}, {"K23", inv.K23}, {"K31", inv.K31}}},
                {"ric_norm_sq", inv.ricNormSq},
                {"riem_norm_sq", inv.riemNormSq},
                {"a2tilde", inv.a2tilde},
                {"Y", heat_discriminant_Y(inv)},
                {"heat", {{"dim_spinor", heat.dimSigma}, {"a0", heat.a0}, {"a1", heat.a1}, {"a2", heat.a2}}}};
}

inline json cmd_reconstruct(Context& ctx, double vol, double scal, std::optional<double> mu_v,
                            std::optional<double> C_v, std::optional<double> a2_v) {
    const int given = int(mu_v.has_value()) + int(C_v.has_value()) + int(a2_v.has_value());
    if (given != 1) throw UsageError("reconstruct needs exactly one of --mu, --C, --a2tilde");
    Discriminator d = mu_v ? Discriminator{MuValue{*mu_v}} : C_v ? Discriminator{CValue{*C_v}} : Discriminator{A2TildeValue{*a2_v}};
    const auto r = reconstruct({*ctx.manifold, vol, scal, d});
    ctx.metric = r.metric();
    return json{{"a", r.triple[0]},
                {"b", r.triple[1]},
                {"c", r.triple[2]},
                {"branch", std::string(to_string(r.branch))},
                {"symmetric", r.symmetric},
                {"residuals",
                 {{"volume", r.residuals.volume}, {"scal", r.residuals.scal}, {"discriminator", r.residuals.discriminator}}}};
}

inline json cmd_heat_trace(Context& ctx, const std::vector<double>& times, int max_level) {
    json rows = json::array();
    for (double t : times) {
        const auto h = heat_trace(*ctx.metric, *ctx.manifold, t, max_level);
        const double asym = heat_trace_asymptotic(*ctx.metric, *ctx.manifold, t);
        rows.push_back({{"t", t},
                        {"value", h.value},
                        {"tail_estimate", h.tailEstimate},
                        {"tail_bounded", std::isfinite(h.tailEstimate)},
                        {"asymptotic", asym},
                        {"relative_deviation", rel_diff(h.value, asym)}});
    }
    return json{{"max_level", max_level}, {"traces", std::move(rows)}};
}

inline json cmd_count(Context& ctx, double lambda, int max_level, std::ostream& err) {
    const auto c = counting_function(*ctx.metric, *ctx.manifold, lambda, max_level);
    if (!c.horizonSufficient)
        err << "warning: level " << max_level << " still has |lambda| <= Lambda; the count may be incomplete\n";
    return json{{"lambda", lambda},
                {"max_level", max_level},
                {"count", c.count},
                {"horizon_sufficient", c.horizonSufficient},
                {"top_level_min_abs", c.topLevelMinAbs},
                {"weyl_estimate", weyl_count(*ctx.metric, *ctx.manifold, lambda)}};
}

inline json cmd_gershgorin(Context& ctx, int level) {
    const auto t = gershgorin_table(*ctx.metric, level);
    json rows = json::array();
    for (int k = 0; k <= level; ++k) {
        rows.push_back({{"k", k},
                        {"G", t.G[k]},
                        {"Gtilde", t.Gtilde[k]},
                        {"row_bound_A", t.rowBoundsA[k]},
                        {"row_bound_B", t.rowBoundsB[k]}});
    }
    const double ma = min_abs_eigenvalue(build_block(t.metric, level, BlockTag::A));
    const double mb = min_abs_eigenvalue(build_block(t.metric, level, BlockTag::B));
    const double lowest = std::min(ma, mb);
    return json{{"level", level},
                {"sorted_metric", metric_json(t.metric)},
                {"rows", std::move(rows)},
                {"min_bound", t.min_bound()},
                {"min_eigenvalue_D_squared", lowest * lowest},
                {"triangle_increment", triangle_increment_closed(t.metric, level)}};
}

/// Largest entrywise deviation between the recurrence blocks and the assembled operator,
/// relative to 1 + max-norm, over levels 0..max_level.
inline double oracle_deviation(const Metric& m, int max_level) {
    double worst = 0.0;
    for (int n = 0; n <= max_level; ++n) {
        const auto rep = build_from_representation(m, n);
        for (BlockTag tag : {BlockTag::A, BlockTag::B}) {
            const auto ref = build_block(m, n, tag);
            const auto got = rep.block(tag, ref.shift);
            const double scale = 1.0 + ref.max_norm();
            for (int i = 0; i <= n; ++i)
                for (int j = std::max(0, i - 1); j <= std::min(n, i + 1); ++j)
                    worst = std::max(worst, std::abs(ref.entry(i, j) - got.entry(i, j)) / scale);
        }
    }
    return worst;
}

inline json cmd_verify(Context& ctx, const std::array<GridAxis, 3>& grid, int horizon, int oracle_level,
                       double oracle_tol) {
    json points = json::array();
    int passed = 0, failed = 0, skipped = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid[0].count; ++i)
        for (int j = 0; j < grid[1].count; ++j)
            for (int k = 0; k < grid[2].count; ++k) {
                const Metric m(grid[0].at(i), grid[1].at(j), grid[2].at(k));
                json p{{"metric", metric_json(m)}};
                const auto sign = scal_sign(m);
                if (sign != ScalSign::Positive) {
                    p["status"] = "skipped";
                    p["reason"] = "scal " + std::string(sign == ScalSign::Zero ? "= 0" : "< 0") +
                                  ": outside the positive-curvature regime";
                    ++skipped;
                    points.push_back(std::move(p));
                    continue;
                }
                bool ok = true;
                json failures = json::array();
                const auto trace = certification_report(m, horizon);
                if (const Check* f = trace.first_failure()) {
                    ok = false;
                    failures.push_back(check_json(*f));
                }
                const auto base = base_cases_report(m, horizon);
                if (const Check* f = base.first_failure()) {
                    ok = false;
                    failures.push_back(check_json(*f));
                }
                const double dev = oracle_deviation(m, oracle_level);
                if (!(dev <= oracle_tol)) {
                    ok = false;
                    failures.push_back({{"step", "block oracle"}, {"deviation", dev}, {"tolerance", oracle_tol}});
                }
                const double margin = trace.min_relative_margin();
                worst_margin = std::min(worst_margin, margin);
                p["status"] = ok ? "passed" : "failed";
                p["checks"] = trace.checks.size() + base.checks.size();
                p["min_relative_margin"] = margin;
                p["oracle_deviation"] = dev;
                if (!ok) p["failures"] = std::move(failures);
                (ok ? passed : failed)++;
                points.push_back(std::move(p));
            }
    if (failed > 0) ctx.exit = kExitFailure;
    return json{{"horizon", horizon},
                {"oracle_max_level", oracle_level},
                {"summary", {{"points", passed + failed + skipped}, {"passed", passed}, {"failed", failed}, {"skipped", skipped}}},
                {"min_relative_margin", worst_margin},
                {"all_passed", failed == 0},
                {"points", std::move(points)}};
}

// ---------------------------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Dirac spectra of left-invariant metrics on S^3 and SO(3)", "diracs3"};
    app.require_subcommand(1);
    bool timing = false;
    app.add_flag("--timing", timing, "add wall-clock timing to the output");

    std::string metric_s, manifold_s = "s3";
    auto add_metric = [&](CLI::App* sub) {
        sub->add_option("--metric", metric_s, "a,b,c (decimal or rational literals)")->required();
    };
    auto add_manifold = [&](CLI::App* sub) {
        sub->add_option("--manifold", manifold_s, "s3 | so3-trivial | so3-nontrivial")
            ->check(CLI::IsMember({"s3", "so3-trivial", "so3-nontrivial"}));
    };

    int max_level = -1;
    std::string merge_tol_s = "1e-9", format = "json";
    bool merged = false;
    auto* sp = app.add_subcommand("spectrum", "eigenvalues of D over levels <= max-level");
    add_metric(sp);
    add_manifold(sp);
    sp->add_option("--max-level", max_level, "highest level n")->required()->check(CLI::NonNegativeNumber);
    sp->add_option("--merge-tol", merge_tol_s, "relative tolerance of the merged view");
    sp->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    sp->add_flag("--merged", merged, "include lines merged across levels");

    std::string certify_s = "auto";
    int horizon = 200;
    bool with_trace = false;
    auto* sm = app.add_subcommand("smallest", "smallest |lambda| and the multiplicity of its square");
    add_metric(sm);
    add_manifold(sm);
    sm->add_option("--max-level", max_level, "enumeration horizon (default 25)")->check(CLI::NonNegativeNumber);
    sm->add_option("--certify", certify_s, "off | auto | required")->check(CLI::IsMember({"off", "auto", "required"}));
    sm->add_option("--horizon", horizon, "certification horizon")->check(CLI::Range(6, 1000000));
    sm->add_flag("--trace", with_trace, "list every verified relation");

    auto* iv = app.add_subcommand("invariants", "C, mu, curvature and heat invariants");
    add_metric(iv);
    add_manifold(iv);

    std::string vol_s, scal_s, mu_s, C_s, a2_s;
    auto* rc = app.add_subcommand("reconstruct", "recover (a,b,c) from volume, scal and mu | C | a2tilde");
    add_manifold(rc);
    rc->add_option("--volume", vol_s)->required();
    rc->add_option("--scal", scal_s)->required();
    auto* o_mu = rc->add_option("--mu", mu_s);
    auto* o_C = rc->add_option("--C", C_s);
    auto* o_a2 = rc->add_option("--a2tilde", a2_s);
    o_mu->excludes(o_C)->excludes(o_a2);
    o_C->excludes(o_a2);

    std::vector<std::string> times_s;
    auto* ht = app.add_subcommand("heat-trace", "truncated heat trace against its small-time expansion");
    add_metric(ht);
    add_manifold(ht);
    ht->add_option("--t", times_s, "time(s) t > 0")->required();
    ht->add_option("--max-level", max_level, "highest level (default 60)")->check(CLI::NonNegativeNumber);

    std::string lambda_s;
    auto* ct = app.add_subcommand("count", "number of eigenvalues with |lambda| <= Lambda");
    add_metric(ct);
    add_manifold(ct);
    ct->add_option("--lambda", lambda_s)->required();
    ct->add_option("--max-level", max_level, "highest level (default 60)")->check(CLI::NonNegativeNumber);

    int level = 0;
    auto* gs = app.add_subcommand("gershgorin", "Gershgorin endpoints of D_n^2 at one level");
    add_metric(gs);
    gs->add_option("--level", level)->required()->check(CLI::NonNegativeNumber);

    std::string grid_s;
    int oracle_level = 12;
    std::string oracle_tol_s = "1e-12";
    auto* vf = app.add_subcommand("verify", "replay the lower-bound argument over a grid of metrics");
    vf->add_option("--grid", grid_s, "lo:hi:n,lo:hi:n,lo:hi:n")->required();
    vf->add_option("--horizon", horizon, "verification horizon")->check(CLI::Range(6, 1000000));
    vf->add_option("--oracle-level", oracle_level, "levels compared against the assembled operator")
        ->check(CLI::Range(0, 64));
    vf->add_option("--oracle-tol", oracle_tol_s);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Context ctx;
    ctx.argv = args;
    ctx.threads = thread_count();
    const auto t0 = std::chrono::steady_clock::now();
    json result;
    std::string csv;
    try {
        auto* sub = app.get_subcommands().front();
        ctx.command = sub->get_name();
        if (sub != rc && sub != vf) ctx.metric = parse_metric(metric_s);
        if (sub != gs && sub != vf) ctx.manifold = parse_manifold(manifold_s);

        if (sub == sp) {
            const double mt = parse_real(merge_tol_s);
            if (!(mt >= 0.0)) throw UsageError("--merge-tol must be non-negative");
            if (format == "csv") csv = spectrum_csv(*ctx.metric, *ctx.manifold, max_level, ctx.threads);
            else result = cmd_spectrum(ctx, max_level, mt, merged);
        } else if (sub == sm) {
            const Certification mode = certify_s == "off"    ? Certification::Off
                                       : certify_s == "auto" ? Certification::Auto
                                                             : Certification::Required;
            result = cmd_smallest(ctx, max_level < 0 ? 25 : max_level, mode, horizon, with_trace);
        } else if (sub == iv) {
            result = cmd_invariants(ctx);
        } else if (sub == rc) {
            auto opt = [](const CLI::Option* o, const std::string& s) {
                return o->count() ? std::optional<double>(parse_real(s)) : std::nullopt;
            };
            result = cmd_reconstruct(ctx, parse_real(vol_s), parse_real(scal_s), opt(o_mu, mu_s), opt(o_C, C_s),
                                     opt(o_a2, a2_s));
        } else if (sub == ht) {
            std::vector<double> times;
            for (const auto& s : times_s) {
                const double t = parse_real(s);
                if (!(t > 0.0)) throw UsageError("--t must be positive");
                times.push_back(t);
            }
            result = cmd_heat_trace(ctx, times, max_level < 0 ? 60 : max_level);
        } else if (sub == ct) {
            const double lam = parse_real(lambda_s);
            if (!(lam > 0.0)) throw UsageError("--lambda must be positive");
            result = cmd_count(ctx, lam, max_level < 0 ? 60 : max_level, err);
        } else if (sub == gs) {
            result = cmd_gershgorin(ctx, level);
        } else if (sub == vf) {
            result = cmd_verify(ctx, parse_grid(grid_s), horizon, oracle_level, parse_real(oracle_tol_s));
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        result = json{{"error", error_json(e)}};
        ctx.exit = kExitFailure;
    }

    if (!csv.empty()) {
        out << csv;
        return ctx.exit;
    }
    json doc{{"schema_version", kSchemaVersion},
             {"command", {{"name", ctx.command}, {"args", ctx.argv}}},
             {"metric", ctx.metric ? metric_json(*ctx.metric) : json(nullptr)},
             {"manifold", ctx.manifold ? json(std::string(to_string(*ctx.manifold))) : json(nullptr)},
             {"result", std::move(result)}};
    if (timing) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        doc["timing"] = {{"seconds", dt.count()}};
    }
    std::string text;
    write_json(doc, text);
    out << text << "\n";
    return ctx.exit;
}

} // namespace diracs3::cli
