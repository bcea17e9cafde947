#pragma once

// Eigenvalues of real tridiagonal matrices whose off-diagonal pairs satisfy
// sub[k] * super[k] >= 0 (with joint vanishing). A diagonal similarity turns such a matrix
// into a symmetric one with off-diagonal sqrt(sub[k] * super[k]); its eigenvalues are then
// located by Sturm-sequence bisection inside Gershgorin brackets.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "blocks.hpp"
#include "common.hpp"

namespace diracs3 {

struct SymmetrizedTridiagonal {
    std::vector<double> diag;
    std::vector<double> offdiag; // nonnegative
    /// Indices i with offdiag[i] == 0; the matrix decouples between rows i and i+1.
    std::vector<int> blockBoundaries;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(diag.size()); }

    [[nodiscard]] double max_norm() const noexcept {
        double m = 0.0;
        for (double v : diag) m = std::max(m, std::abs(v));
        for (double v : offdiag) m = std::max(m, v);
        return m;
    }
};

inline SymmetrizedTridiagonal symmetrize(const DiracBlock& b) {
    SymmetrizedTridiagonal t;
    t.diag = b.diag;
    t.offdiag.resize(b.sub.size());
    for (size_t k = 0; k < b.sub.size(); ++k) {
        const double lo = b.sub[k], up = b.super[k];
        if ((lo == 0.0) != (up == 0.0) || lo * up < 0.0) {
            throw Error(Errc::Structural, "block " + std::string(to_string(b.tag)) + " at level " +
                                              std::to_string(b.level) +
                                              " is not symmetrizable at off-diagonal " + std::to_string(k));
        }
        t.offdiag[k] = std::sqrt(lo * up);
        if (t.offdiag[k] == 0.0) t.blockBoundaries.push_back(static_cast<int>(k));
    }
    return t;
}

/// Scale-aware default accuracy, a few ulps of the max-norm: bisection is run essentially to
/// the limit the Sturm count can resolve.
inline double default_tolerance(const SymmetrizedTridiagonal& t) noexcept {
    return 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + t.max_norm());
}

inline double default_tolerance(const DiracBlock& b) noexcept {
    return 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + b.max_norm());
}

namespace detail {

/// Sturm count on rows [first, last): number of eigenvalues strictly below x.
inline int sturm_count_range(const SymmetrizedTridiagonal& t, int first, int last, double x) noexcept {
    const double pivmin = std::numeric_limits<double>::min() * std::max(1.0, t.max_norm());
    int count = 0;
    double q = 1.0;
    for (int i = first; i < last; ++i) {
        const double e2 = i > first ? t.offdiag[i - 1] * t.offdiag[i - 1] : 0.0;
        q = (t.diag[i] - x) - (i > first ? e2 / q : 0.0);
        if (std::abs(q) < pivmin) q = -pivmin;
        if (q < 0.0) ++count;
    }
    return count;
}

struct Bracket {
    double lo;
    double hi;
};

inline Bracket gershgorin_bracket(const SymmetrizedTridiagonal& t, int first, int last) noexcept {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int i = first; i < last; ++i) {
        const double r = (i > first ? t.offdiag[i - 1] : 0.0) + (i + 1 < last ? t.offdiag[i] : 0.0);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 2.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(lo), std::abs(hi)});
    return {lo - pad, hi + pad};
}

/// The index-th smallest eigenvalue (0-based) of rows [first, last) by bisection.
inline double bisect_eigenvalue(const SymmetrizedTridiagonal& t, int first, int last, int index, Bracket br,
                                double tol) noexcept {
    double lo = br.lo, hi = br.hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sturm_count_range(t, first, last, mid) > index) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

/// Ranges [first, last) of the irreducible sub-blocks.
inline std::vector<std::pair<int, int>> irreducible_ranges(const SymmetrizedTridiagonal& t) {
    std::vector<std::pair<int, int>> out;
    int first = 0;
    for (int b : t.blockBoundaries) {
        out.emplace_back(first, b + 1);
        first = b + 1;
    }
    out.emplace_back(first, t.size());
    return out;
}

} // namespace detail

/// Number of eigenvalues strictly below x.
inline int sturm_count(const SymmetrizedTridiagonal& t, double x) {
    int count = 0;
    for (auto [first, last] : detail::irreducible_ranges(t)) count += detail::sturm_count_range(t, first, last, x);
    return count;
}

/// All eigenvalues, ascending, each within tol of the exact value. Repeated eigenvalues are
/// reported as repeated entries.
inline std::vector<double> eigenvalues(const SymmetrizedTridiagonal& t, double tol) {
    if (!(tol > 0.0)) throw Error(Errc::Domain, "eigenvalue tolerance must be positive");
    std::vector<double> out;
    out.reserve(t.size());
    for (auto [first, last] : detail::irreducible_ranges(t)) {
        const auto br = detail::gershgorin_bracket(t, first, last);
        for (int i = 0; i < last - first; ++i) out.push_back(detail::bisect_eigenvalue(t, first, last, i, br, tol));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<double> eigenvalues(const SymmetrizedTridiagonal& t) { return eigenvalues(t, default_tolerance(t)); }

inline std::vector<double> eigenvalues(const DiracBlock& b) { return eigenvalues(symmetrize(b)); }

/// min |lambda| over the spectrum of the block. Only the two eigenvalues adjacent to zero are
/// resolved: the Sturm count at 0 tells which they are.
inline double min_abs_eigenvalue(const DiracBlock& b, double tol) {
    if (!(tol > 0.0)) throw Error(Errc::Domain, "eigenvalue tolerance must be positive");
    const auto t = symmetrize(b);
    double best = std::numeric_limits<double>::infinity();
    for (auto [first, last] : detail::irreducible_ranges(t)) {
        const int below = detail::sturm_count_range(t, first, last, 0.0);
        const auto br = detail::gershgorin_bracket(t, first, last);
        if (below > 0) best = std::min(best, std::abs(detail::bisect_eigenvalue(t, first, last, below - 1, br, tol)));
        if (below < last - first)
            best = std::min(best, std::abs(detail::bisect_eigenvalue(t, first, last, below, br, tol)));
    }
    return best;
}

inline double min_abs_eigenvalue(const DiracBlock& b) { return min_abs_eigenvalue(b, default_tolerance(b)); }

} // namespace diracs3
