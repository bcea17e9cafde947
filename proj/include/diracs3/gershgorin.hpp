#pragma once

// Gershgorin lower bounds for the eigenvalues of D_n^2.
//
// The squares of the tridiagonal blocks are pentadiagonal with explicit entries. The left
// endpoint of row k (diagonal minus absolute off-diagonal row sum) bounds every eigenvalue of
// D_n^2 from below. For b >= c the signs of the row entries are fixed, which yields the closed
// polynomials G(n,k) and Gt(n,k) below; with a >= b >= c these satisfy the monotonicity
// G(n+2, k+1) > G(n, k) whenever scal > 0, plus a handful of base-case inequalities.

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "common.hpp"
#include "metric.hpp"

namespace diracs3 {

/// Row k of A_n^2 or B_n^2: entries at columns k-2, k-1, k, k+1, k+2.
/// Columns outside [0, n] come out as exact zeros.
inline std::array<double, 5> squared_row_entries(const Metric& m, int n, BlockTag tag, int k) {
    if (k < 0 || k > n) throw Error(Errc::Domain, "row index out of range");
    const bool even_pattern = (k % 2 == 0) == (tag == BlockTag::A);
    const double sgn = even_pattern ? 1.0 : -1.0;
    const double a = sgn * m.a(), b = sgn * m.b(), c = m.c();
    const double C = shift_C(m);
    const double K = k, N = n;
    return {
        (c - b) * (c + b) * K * (K - 1.0),
        -2.0 * (c - b) * (C + a) * K,
        (c - b) * (c - b) * K * (N - K + 1.0) + (a * (N - 2.0 * K) - C) * (a * (N - 2.0 * K) - C) +
            (c + b) * (c + b) * (N - K) * (K + 1.0),
        -2.0 * (c + b) * (C - a) * (N - K),
        (c + b) * (c - b) * (N - K) * (N - K - 1.0),
    };
}

/// Left endpoint of the k-th Gershgorin interval of A_n^2 or B_n^2.
inline double row_bound(const Metric& m, int n, BlockTag tag, int k) {
    const auto e = squared_row_entries(m, n, tag, k);
    return e[2] - std::abs(e[0]) - std::abs(e[1]) - std::abs(e[3]) - std::abs(e[4]);
}

/// min over k and both tags of row_bound: a lower bound for the spectrum of D_n^2.
inline double min_row_bound(const Metric& m, int n) {
    double lo = std::numeric_limits<double>::infinity();
    for (BlockTag tag : {BlockTag::A, BlockTag::B})
        for (int k = 0; k <= n; ++k) lo = std::min(lo, row_bound(m, n, tag, k));
    return lo;
}

enum class GVariant { G, Gtilde };

namespace detail {

/// G(n,k) or Gt(n,k) evaluated literally on (a, b, c); callers guarantee b >= c.
inline double closed_G_raw(double a, double b, double c, double C, double n, double k, GVariant v) noexcept {
    const double shared = -(b * b - c * c) * (k * (k - 1.0) + (n - k) * (n - k - 1.0));
    if (v == GVariant::G) {
        const double d = a * (n - 2.0 * k) - C;
        return d * d + (b - c) * (b - c) * k * (n - k + 1.0) + (b + c) * (b + c) * (n - k) * (k + 1.0) -
               2.0 * (b - c) * (C + a) * k - 2.0 * (b + c) * (C - a) * (n - k) + shared;
    }
    const double d = a * (n - 2.0 * k) + C;
    return d * d + (b + c) * (b + c) * k * (n - k + 1.0) + (b - c) * (b - c) * (n - k) * (k + 1.0) -
           2.0 * (b + c) * (C - a) * k - 2.0 * (b - c) * (C + a) * (n - k) + shared;
}

} // namespace detail

/// Closed-form Gershgorin endpoint G(n,k) or Gt(n,k). The metric is first permuted to
/// a >= b >= c (an isometry), which the sign analysis behind the formulas requires.
inline double closed_form_G(const Metric& m, int n, int k, GVariant v = GVariant::G) {
    if (n < 0 || k < 0 || k > n) throw Error(Errc::Domain, "closed_form_G needs 0 <= k <= n");
    const Metric s = sort_descending(m).metric;
    return detail::closed_G_raw(s.a(), s.b(), s.c(), shift_C(s), n, k, v);
}

/// Endpoints of every row at one level, for the metric permuted to a >= b >= c.
struct GershgorinTable {
    Metric metric; // sorted
    std::array<int, 3> perm;
    int level;
    std::vector<double> G;
    std::vector<double> Gtilde;
    std::vector<double> rowBoundsA; // direct endpoints of A_n^2 rows
    std::vector<double> rowBoundsB; // direct endpoints of B_n^2 rows

    /// The closed form expected for row k of the given block: G on the "even pattern"
    /// rows (A with even k, B with odd k), Gt on the others.
    [[nodiscard]] double expected_row_bound(BlockTag tag, int k) const {
        const bool even_pattern = (k % 2 == 0) == (tag == BlockTag::A);
        return even_pattern ? G[k] : Gtilde[k];
    }

    [[nodiscard]] double min_bound() const {
        double lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= level; ++k) lo = std::min({lo, G[k], Gtilde[k]});
        return lo;
    }
};

inline GershgorinTable gershgorin_table(const Metric& m, int n) {
    if (n < 0) throw Error(Errc::Domain, "level must be non-negative");
    const auto sorted = sort_descending(m);
    const Metric& s = sorted.metric;
    const double C = shift_C(s);
    GershgorinTable t{s, sorted.perm, n, {}, {}, {}, {}};
    for (int k = 0; k <= n; ++k) {
        t.G.push_back(detail::closed_G_raw(s.a(), s.b(), s.c(), C, n, k, GVariant::G));
        t.Gtilde.push_back(detail::closed_G_raw(s.a(), s.b(), s.c(), C, n, k, GVariant::Gtilde));
        t.rowBoundsA.push_back(row_bound(s, n, BlockTag::A, k));
        t.rowBoundsB.push_back(row_bound(s, n, BlockTag::B, k));
    }
    return t;
}

/// G(n+2, k+1) - G(n, k) for the sorted metric, checked against the k-independent closed form
/// 4(c^2 n - bC + ac + b^2 + c^2).
inline double triangle_increment_closed(const Metric& m, int n) {
    const Metric s = sort_descending(m).metric;
    const double a = s.a(), b = s.b(), c = s.c(), C = shift_C(s);
    return 4.0 * (c * c * n - b * C + a * c + b * b + c * c);
}

inline double triangle_increment(const Metric& m, int n, int k, double rel_tol = 1e-10) {
    if (n < 0 || k < 0 || k > n) throw Error(Errc::Domain, "triangle_increment needs 0 <= k <= n");
    const Metric s = sort_descending(m).metric;
    const double C = shift_C(s);
    const double upper = detail::closed_G_raw(s.a(), s.b(), s.c(), C, n + 2, k + 1, GVariant::G);
    const double lower = detail::closed_G_raw(s.a(), s.b(), s.c(), C, n, k, GVariant::G);
    const double diff = upper - lower;
    const double closed = triangle_increment_closed(s, n);
    const double scale = std::max({std::abs(upper), std::abs(lower), std::abs(closed)});
    if (std::abs(diff - closed) > rel_tol * scale) {
        throw CheckFailure(Errc::Consistency,
                           "triangle increment disagrees with its closed form at n=" + std::to_string(n) +
                               ", k=" + std::to_string(k),
                           n, k);
    }
    return diff;
}

// ---------------------------------------------------------------------------------------------
// Verified inequalities

enum class Relation { Equal, Greater, GreaterEqual };

/// One numerically verified relation between lhs and rhs.
struct Check {
    std::string step;
    int n = -1;
    int k = -1;
    Relation relation = Relation::Greater;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // lhs - rhs
    bool passed = false;
};

/// Tolerances for certification: equalities hold to rel_tol, strict inequalities need a margin
/// above rel_tol * max(|lhs|, |rhs|).
struct CheckTolerance {
    double rel_tol = 1e-12;
};

inline Check make_check(std::string step, int n, int k, Relation rel, double lhs, double rhs,
                        CheckTolerance tol = {}) {
    Check c{std::move(step), n, k, rel, lhs, rhs, lhs - rhs, false};
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    switch (rel) {
    case Relation::Equal: c.passed = std::abs(c.margin) <= tol.rel_tol * scale; break;
    case Relation::Greater: c.passed = c.margin > tol.rel_tol * scale; break;
    case Relation::GreaterEqual: c.passed = c.margin >= -tol.rel_tol * scale; break;
    }
    return c;
}

struct BaseCaseReport {
    Metric metric; // sorted
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
};

/// Evaluates the base cases of the triangle induction up to level N without throwing:
///   G(0,0) = C^2,  G(n,n) > C^2 (1 <= n <= N),  G(n,0) > C^2 (6 <= n <= N),
///   G(n,1) > C^2 (4 <= n <= N),  G(1,0) = mu^2,  G(5,0) > mu^2.
inline BaseCaseReport base_cases_report(const Metric& m, int N, CheckTolerance tol = {}) {
    if (N < 6) throw Error(Errc::Domain, "base-case horizon must be at least 6");
    const auto sorted = sort_descending(m);
    const Metric& s = sorted.metric;
    const double C = shift_C(s), C2 = C * C, mu2 = mu(s) * mu(s);
    auto G = [&](int n, int k) { return detail::closed_G_raw(s.a(), s.b(), s.c(), C, n, k, GVariant::G); };

    BaseCaseReport r{s, sorted.perm, N, {}};
    r.checks.push_back(make_check("G(0,0) = C^2", 0, 0, Relation::Equal, G(0, 0), C2, tol));
    for (int n = 1; n <= N; ++n) r.checks.push_back(make_check("G(n,n) > C^2", n, n, Relation::Greater, G(n, n), C2, tol));
    for (int n = 6; n <= N; ++n) r.checks.push_back(make_check("G(n,0) > C^2", n, 0, Relation::Greater, G(n, 0), C2, tol));
    for (int n = 4; n <= N; ++n) r.checks.push_back(make_check("G(n,1) > C^2", n, 1, Relation::Greater, G(n, 1), C2, tol));
    r.checks.push_back(make_check("G(1,0) = mu^2", 1, 0, Relation::Equal, G(1, 0), mu2, tol));
    r.checks.push_back(make_check("G(5,0) > mu^2", 5, 0, Relation::Greater, G(5, 0), mu2, tol));
    return r;
}

/// As base_cases_report, but requires scal > 0 and throws on the first violated relation.
inline BaseCaseReport base_cases(const Metric& m, int N, CheckTolerance tol = {}) {
    if (scal_sign(m) != ScalSign::Positive)
        throw Error(Errc::Uncertifiable, "base cases require positive scalar curvature");
    auto r = base_cases_report(m, N, tol);
    if (const Check* f = r.first_failure()) {
        throw CheckFailure(Errc::BaseCaseFailure,
                           "base case '" + f->step + "' failed at n=" + std::to_string(f->n) +
                               ", k=" + std::to_string(f->k),
                           f->n, f->k);
    }
    return r;
}

} // namespace diracs3
