#pragma once

// Global Dirac spectra of (S^3, g_abc) and of (SO(3), g_abc) with either spin structure.
//
// The spectrum of D is the union over levels n of the spectra of D_n, each eigenvalue of D_n
// of multiplicity m contributing m (n+1). SO(3) with the trivial spin structure sees the even
// levels only, the nontrivial one the odd levels. Reversing the orientation flips the sign of D;
// everything here uses the standard orientation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "blocks.hpp"
#include "common.hpp"
#include "eigen.hpp"
#include "gershgorin.hpp"
#include "metric.hpp"

namespace diracs3 {

/// Which blocks of D_n an eigenvalue came from.
enum class LineTag { A, B, AB };

inline std::string_view to_string(LineTag t) {
    switch (t) {
    case LineTag::A: return "A";
    case LineTag::B: return "B";
    case LineTag::AB: return "AB";
    }
    return "?";
}

struct SpectralLine {
    double eigenvalue;
    int level;
    LineTag tag;
    int blockMultiplicity; // multiplicity as an eigenvalue of D_n
    long long totalMultiplicity; // blockMultiplicity * (level + 1)
};

/// Lines with numerically coincident eigenvalues combined across levels.
struct MergedLine {
    double eigenvalue;
    long long multiplicity;
    std::vector<int> levels;
};

struct AssembleOptions {
    /// Relative tolerance under which eigenvalues of one D_n count as a repeated eigenvalue.
    double coincidenceTol = 1e-9;
    /// Relative tolerance for the merged cross-level view.
    double mergeTol = 1e-9;
    /// Worker threads for the level sweep; 0 or 1 runs sequentially.
    unsigned threads = 1;
};

struct Spectrum {
    Manifold manifold;
    Metric metric;
    int maxLevel;
    std::vector<SpectralLine> lines; // ascending by (eigenvalue, level, tag)
    double mergeTolerance;

    /// Lines merged across levels when their eigenvalues agree to mergeTolerance
    /// (relative, floored at the metric scale C).
    [[nodiscard]] std::vector<MergedLine> merged() const {
        std::vector<MergedLine> out;
        const double floor = shift_C(metric);
        for (const auto& l : lines) {
            if (!out.empty()) {
                auto& back = out.back();
                const double scale = std::max({std::abs(back.eigenvalue), std::abs(l.eigenvalue), floor});
                if (std::abs(back.eigenvalue - l.eigenvalue) <= mergeTolerance * scale) {
                    back.multiplicity += l.totalMultiplicity;
                    if (back.levels.back() != l.level) back.levels.push_back(l.level);
                    continue;
                }
            }
            out.push_back({l.eigenvalue, l.totalMultiplicity, {l.level}});
        }
        return out;
    }

    /// Total number of eigenvalues counted with multiplicity.
    [[nodiscard]] long long total_count() const {
        long long s = 0;
        for (const auto& l : lines) s += l.totalMultiplicity;
        return s;
    }
};

namespace detail {

/// Eigenvalues of D_n grouped into lines.
inline std::vector<SpectralLine> level_lines(const Metric& m, int n, double coincidence_tol) {
    struct Tagged {
        double value;
        BlockTag tag;
    };
    std::vector<Tagged> all;
    for (BlockTag tag : {BlockTag::A, BlockTag::B})
        for (double v : eigenvalues(build_block(m, n, tag))) all.push_back({v, tag});
    std::stable_sort(all.begin(), all.end(), [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

    const double floor = shift_C(m);
    std::vector<SpectralLine> lines;
    size_t i = 0;
    while (i < all.size()) {
        size_t j = i + 1;
        double sum = all[i].value;
        bool hasA = all[i].tag == BlockTag::A, hasB = !hasA;
        while (j < all.size()) {
            const double scale = std::max({std::abs(all[i].value), std::abs(all[j].value), floor});
            if (all[j].value - all[j - 1].value > coincidence_tol * scale) break;
            sum += all[j].value;
            (all[j].tag == BlockTag::A ? hasA : hasB) = true;
            ++j;
        }
        const int mult = static_cast<int>(j - i);
        const LineTag tag = hasA && hasB ? LineTag::AB : (hasA ? LineTag::A : LineTag::B);
        lines.push_back({sum / mult, n, tag, mult, static_cast<long long>(mult) * (n + 1)});
        i = j;
    }
    return lines;
}

inline std::vector<int> admissible_levels(Manifold manifold, int maxLevel) {
    std::vector<int> levels;
    for (int n = 0; n <= maxLevel; ++n)
        if (admits_level(manifold, n)) levels.push_back(n);
    return levels;
}

} // namespace detail

inline Spectrum assemble(const Metric& m, Manifold manifold, int maxLevel, const AssembleOptions& opts = {}) {
    if (maxLevel < 0) throw Error(Errc::Domain, "maxLevel must be non-negative");
    const auto levels = detail::admissible_levels(manifold, maxLevel);
    std::vector<std::vector<SpectralLine>> per_level(levels.size());

    const unsigned workers = std::min<unsigned>(std::max(1u, opts.threads), static_cast<unsigned>(levels.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < levels.size(); ++i) per_level[i] = detail::level_lines(m, levels[i], opts.coincidenceTol);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next++; i < levels.size(); i = next++)
                    per_level[i] = detail::level_lines(m, levels[i], opts.coincidenceTol);
            });
        }
        for (auto& th : pool) th.join();
    }

    Spectrum s{manifold, m, maxLevel, {}, opts.mergeTol};
    for (auto& v : per_level) s.lines.insert(s.lines.end(), v.begin(), v.end());
    std::stable_sort(s.lines.begin(), s.lines.end(), [](const SpectralLine& x, const SpectralLine& y) {
        if (x.eigenvalue != y.eigenvalue) return x.eigenvalue < y.eigenvalue;
        if (x.level != y.level) return x.level < y.level;
        return x.tag < y.tag;
    });
    return s;
}

// ---------------------------------------------------------------------------------------------
// Smallest |eigenvalue| and its certification

/// Record of the replayed verification for scal > 0: explicit low levels, Gershgorin base cases,
/// triangle increments, and the resulting lower bounds up to the horizon.
struct CertificationTrace {
    Metric metric; // sorted a >= b >= c
    std::array<int, 3> perm;
    int horizon;
    std::vector<Check> checks;

    [[nodiscard]] bool passed() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    [[nodiscard]] const Check* first_failure() const {
        for (const auto& c : checks)
            if (!c.passed) return &c;
        return nullptr;
    }
    /// Smallest margin among the strict inequalities, relative to max(|lhs|, |rhs|).
    [[nodiscard]] double min_relative_margin() const {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : checks) {
            if (c.relation != Relation::Greater) continue;
            const double s = std::max(std::abs(c.lhs), std::abs(c.rhs));
            best = std::min(best, s == 0.0 ? c.margin : c.margin / s);
        }
        return best;
    }
};

/// Replays the argument that min |lambda| is mu (odd levels) resp. C (even levels) for the given
/// metric, without throwing on failed relations. Requires scal > 0 and horizon >= 6.
inline CertificationTrace certification_report(const Metric& metric, int horizon = 200) {
    if (scal_sign(metric) != ScalSign::Positive)
        throw Error(Errc::Uncertifiable, "certification requires positive scalar curvature");
    if (horizon < 6) throw Error(Errc::Domain, "certification horizon must be at least 6");

    const auto sorted = sort_descending(metric);
    const Metric& m = sorted.metric;
    const double a = m.a(), b = m.b(), c = m.c();
    const double C = shift_C(m), M = mu(m);
    CertificationTrace tr{m, sorted.perm, horizon, {}};
    auto add = [&](std::string step, int n, int k, Relation rel, double lhs, double rhs, double tol = 1e-12) {
        tr.checks.push_back(make_check(std::move(step), n, k, rel, lhs, rhs, {tol}));
    };

    add("mu > 0", -1, -1, Relation::Greater, M, 0.0);
    add("C >= mu", -1, -1, Relation::GreaterEqual, C, M);

    // n = 0: D_0 = -C on a two-dimensional space
    for (BlockTag tag : {BlockTag::A, BlockTag::B}) {
        const auto blk = build_block(m, 0, tag);
        add("D_0 = -C (" + std::string(to_string(tag)) + ")", 0, 0, Relation::Equal, blk.diag[0], -C);
    }

    // n = 1: closed-form eigenvalues; mu is one of them and the others are larger in modulus
    {
        const auto e = closed_form_eigs(m, 1);
        add("D_1 eigenvalue a+b+c-C = mu", 1, -1, Relation::Equal, e[0], M);
        for (int i = 1; i < 4; ++i) add("|D_1 eigenvalue| > mu", 1, i, Relation::Greater, std::abs(e[i]), M);
    }

    // n = 2: chi_2 is convex on [0, inf) and negative at both ends of [0, 2C]
    {
        const auto chi2 = char_poly_small_n(m, 2);
        add("chi_2(0) < 0", 2, -1, Relation::Greater, 0.0, poly_eval(chi2, 0.0));
        add("chi_2(2C) < 0", 2, -1, Relation::Greater, 0.0, poly_eval(chi2, 2.0 * C));
    }

    // n = 3: none of the eight closed-form eigenvalues of D'_3 lies in [C - mu, C + mu]
    {
        const auto e = closed_form_eigs(m, 3);
        constexpr std::array<bool, 8> below{true, false, true, false, true, true, true, false};
        for (int i = 0; i < 8; ++i) {
            const double shifted = e[i] + C; // eigenvalue of D'_3
            if (below[i]) add("D'_3 box " + std::to_string(i + 1) + " < C - mu", 3, i, Relation::Greater, C - M, shifted);
            else add("D'_3 box " + std::to_string(i + 1) + " > C + mu", 3, i, Relation::Greater, shifted, C + M);
        }
    }

    // n = 4: chi_4 is concave on [0, 2C] (chi_4'' < 0 at both ends, chi_4'' convex) and positive at both ends
    {
        const auto chi4 = char_poly_small_n(m, 4);
        const auto d2 = poly_derivative(poly_derivative(chi4));
        add("chi_4''(0) < 0", 4, -1, Relation::Greater, 0.0, poly_eval(d2, 0.0));
        add("chi_4''(2C) < 0", 4, -1, Relation::Greater, 0.0, poly_eval(d2, 2.0 * C));
        add("chi_4(0) > 0", 4, -1, Relation::Greater, poly_eval(chi4, 0.0), 0.0);
        add("chi_4(2C) > 0", 4, -1, Relation::Greater, poly_eval(chi4, 2.0 * C), 0.0);
    }

    // eigensolver confirmation of the low levels
    for (int n = 0; n <= 5; ++n) {
        double lo = std::numeric_limits<double>::infinity();
        for (BlockTag tag : {BlockTag::A, BlockTag::B}) lo = std::min(lo, min_abs_eigenvalue(build_block(m, n, tag)));
        const std::string name = "eigensolver min|lambda(D_" + std::to_string(n) + ")|";
        if (n == 0) add(name + " = C", n, -1, Relation::Equal, lo, C, 1e-10);
        else if (n == 1) add(name + " = mu", n, -1, Relation::Equal, lo, M, 1e-10);
        else if (n % 2 == 0) add(name + " > C", n, -1, Relation::Greater, lo, C, 1e-10);
        else add(name + " > mu", n, -1, Relation::Greater, lo, M, 1e-10);
    }

    // Gershgorin base cases
    for (auto& chk : base_cases_report(m, horizon).checks) tr.checks.push_back(std::move(chk));

    // triangle increments G(n+2, k+1) - G(n, k): equal to the k-independent closed form and positive
    auto G = [&](int n, int k) { return detail::closed_G_raw(a, b, c, C, n, k, GVariant::G); };
    for (int n = 0; n + 2 <= horizon; ++n) {
        const double closed = triangle_increment_closed(m, n);
        double worst_dev = 0.0, min_inc = std::numeric_limits<double>::infinity(), scale = std::abs(closed);
        int argmin = 0;
        for (int k = 0; k <= n; ++k) {
            const double up = G(n + 2, k + 1), lo = G(n, k), inc = up - lo;
            scale = std::max({scale, std::abs(up), std::abs(lo)});
            worst_dev = std::max(worst_dev, std::abs(inc - closed));
            if (inc < min_inc) {
                min_inc = inc;
                argmin = k;
            }
        }
        tr.checks.push_back({"triangle increment matches 4(c^2 n - bC + ac + b^2 + c^2)", n, -1, Relation::Equal,
                             worst_dev, 0.0, worst_dev, worst_dev <= 1e-10 * scale});
        add("G(n+2,k+1) - G(n,k) > 0", n, argmin, Relation::Greater, min_inc, 0.0);
    }

    // resulting Gershgorin lower bounds for D_n^2, n >= 5
    for (int n = 5; n <= horizon; ++n) {
        double lo = std::numeric_limits<double>::infinity();
        int argmin = 0;
        for (int k = 0; k <= n; ++k) {
            const double v = std::min(G(n, k), detail::closed_G_raw(a, b, c, C, n, k, GVariant::Gtilde));
            if (v < lo) {
                lo = v;
                argmin = k;
            }
        }
        if (n % 2 == 0) add("min_k G(n,k) > C^2", n, argmin, Relation::Greater, lo, C * C);
        else add("min_k G(n,k) > mu^2", n, argmin, Relation::Greater, lo, M * M);
    }
    return tr;
}

/// As certification_report, but throws CheckFailure(CertificationFailure) on the first failed relation.
inline CertificationTrace certify_theorem1(const Metric& m, int horizon = 200) {
    auto tr = certification_report(m, horizon);
    if (const Check* f = tr.first_failure()) {
        throw CheckFailure(Errc::CertificationFailure,
                           "certification step '" + f->step + "' failed at n=" + std::to_string(f->n) +
                               ", k=" + std::to_string(f->k),
                           f->n, f->k);
    }
    return tr;
}

enum class Certification {
    Off,      // always enumerate numerically
    Auto,     // certify when scal > 0, enumerate otherwise
    Required, // certify or throw Uncertifiable
};

struct SmallestOptions {
    int maxLevel = 25;
    Certification certification = Certification::Auto;
    int horizon = 200;
    double roundTol = 1e-12;       // a = b = c detection
    double coincidenceTol = 1e-9;  // multiplicity of the minimum in enumeration
};

struct SmallestEigenvalueReport {
    double value;
    long long multiplicityOfDSquared;
    bool certified;
    std::optional<CertificationTrace> certificationTrace;
    int maxLevelUsed; // enumeration horizon; -1 when the value came from certification alone
};

/// Smallest |lambda| over the spectrum of the given manifold.
inline SmallestEigenvalueReport smallest(const Metric& m, Manifold manifold, const SmallestOptions& opts = {}) {
    const bool positive = scal_sign(m) == ScalSign::Positive;
    if (opts.certification == Certification::Required && !positive) {
        throw Error(Errc::Uncertifiable, "scal <= 0: no certified smallest eigenvalue exists; Dirac eigenvalues "
                                         "may cross zero");
    }
    if (positive && opts.certification != Certification::Off) {
        auto trace = certify_theorem1(m, opts.horizon);
        const bool even_only = manifold == Manifold::SO3Trivial;
        const double value = even_only ? shift_C(m) : mu(m);
        const long long mult = manifold == Manifold::S3 && m.is_round(opts.roundTol) ? 4 : 2;
        return {value, mult, true, std::move(trace), -1};
    }

    const auto spec = assemble(m, manifold, opts.maxLevel);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& l : spec.lines) best = std::min(best, std::abs(l.eigenvalue));
    long long mult = 0;
    const double scale = std::max(best, shift_C(m));
    for (const auto& l : spec.lines)
        if (std::abs(std::abs(l.eigenvalue) - best) <= opts.coincidenceTol * scale) mult += l.totalMultiplicity;
    return {best, mult, false, std::nullopt, opts.maxLevel};
}

// ---------------------------------------------------------------------------------------------
// Heat trace and counting function

struct HeatTraceResult {
    double value;         // sum of multiplicity * exp(-t lambda^2) over levels <= maxLevel
    double tailEstimate;  // bound on the omitted levels; +inf when it could not be bounded
    int maxLevel;
};

namespace detail {

/// Sum over admissible levels n > maxLevel of 2(n+1)^2 exp(-t L_n), where L_n >= 0 is a
/// Gershgorin lower bound for D_n^2 (level n carries 2(n+1) eigenvalues of multiplicity n+1).
inline double heat_tail(const Metric& m, Manifold manifold, double t, int maxLevel, double reference,
                        int max_extra_levels = 5000) {
    const Metric s = sort_descending(m).metric;
    double tail = 0.0;
    double prev_bound = -std::numeric_limits<double>::infinity();
    for (int n = maxLevel + 1; n <= maxLevel + max_extra_levels; ++n) {
        if (!admits_level(manifold, n)) continue;
        const double bound = std::max(0.0, min_row_bound(s, n));
        const double term = 2.0 * (n + 1.0) * (n + 1.0) * std::exp(-t * bound);
        tail += term;
        const bool growing = bound > prev_bound && bound > 0.0;
        prev_bound = bound;
        // the bounds grow quadratically once positive; stop when terms are negligible
        if (growing && (term == 0.0 || term < 1e-20 * (reference + tail))) return tail;
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace detail

inline HeatTraceResult heat_trace(const Metric& m, Manifold manifold, double t, int maxLevel) {
    if (!(t > 0.0)) throw Error(Errc::Domain, "heat-trace time must be positive");
    const auto spec = assemble(m, manifold, maxLevel);
    // sum smallest terms first
    std::vector<double> terms;
    terms.reserve(spec.lines.size());
    for (const auto& l : spec.lines) terms.push_back(static_cast<double>(l.totalMultiplicity) * std::exp(-t * l.eigenvalue * l.eigenvalue));
    std::sort(terms.begin(), terms.end());
    double value = 0.0;
    for (double v : terms) value += v;
    return {value, detail::heat_tail(m, manifold, t, maxLevel, value), maxLevel};
}

/// Small-time expansion (4 pi t)^{-3/2} (a0 + a1 t + a2 t^2).
inline double heat_trace_asymptotic(const Metric& m, Manifold manifold, double t) {
    const auto h = heat_invariants(m, space_of(manifold));
    return std::pow(4.0 * std::numbers::pi * t, -1.5) * (h.a0 + h.a1 * t + h.a2 * t * t);
}

struct CountResult {
    long long count;            // eigenvalues with |lambda| <= Lambda, with multiplicity
    bool horizonSufficient;     // false: the top level still reaches |lambda| <= Lambda
    double topLevelMinAbs;      // min |lambda| over the highest admissible level
};

inline CountResult counting_function(const Metric& m, Manifold manifold, double Lambda, int maxLevel) {
    if (!(Lambda > 0.0)) throw Error(Errc::Domain, "counting threshold must be positive");
    const auto spec = assemble(m, manifold, maxLevel);
    long long count = 0;
    int top = -1;
    for (const auto& l : spec.lines) {
        if (std::abs(l.eigenvalue) <= Lambda) count += l.totalMultiplicity;
        top = std::max(top, l.level);
    }
    double top_min = std::numeric_limits<double>::infinity();
    for (const auto& l : spec.lines)
        if (l.level == top) top_min = std::min(top_min, std::abs(l.eigenvalue));
    return {count, top_min > Lambda, top_min};
}

/// Weyl estimate vol(M) Lambda^3 / (3 pi^2) for the number of Dirac eigenvalues with |lambda| <= Lambda.
inline double weyl_count(const Metric& m, Manifold manifold, double Lambda) {
    return volume(m, space_of(manifold)) * Lambda * Lambda * Lambda / (3.0 * std::numbers::pi * std::numbers::pi);
}

} // namespace diracs3
