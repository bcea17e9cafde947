#pragma once

// Left-invariant metrics g_abc on S^3 = SU(2) and SO(3), and their closed-form invariants.
//
// g_abc makes {a*i, b*j, c*k} orthonormal at the identity, so a, b, c are inverse
// lengths of the Milnor frame. Every quantity below is constant over the manifold.

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "common.hpp"

namespace diracs3 {

class Metric {
public:
    Metric(double a, double b, double c) : abc_{a, b, c} {
        for (double v : abc_) {
            if (!(v > 0.0) || !std::isfinite(v)) {
                throw Error(Errc::Domain, "metric parameters must be finite and strictly positive, got (" +
                                              std::to_string(a) + ", " + std::to_string(b) + ", " +
                                              std::to_string(c) + ")");
            }
        }
    }

    [[nodiscard]] double a() const noexcept { return abc_[0]; }
    [[nodiscard]] double b() const noexcept { return abc_[1]; }
    [[nodiscard]] double c() const noexcept { return abc_[2]; }
    [[nodiscard]] const std::array<double, 3>& params() const noexcept { return abc_; }

    /// Metric with parameters (p[perm[0]], p[perm[1]], p[perm[2]]). Isometric to *this.
    [[nodiscard]] Metric permuted(const std::array<int, 3>& perm) const {
        return {abc_[perm[0]], abc_[perm[1]], abc_[perm[2]]};
    }

    /// a = b = c up to relative tolerance.
    [[nodiscard]] bool is_round(double rel_tol = 1e-12) const noexcept {
        return approx_rel(abc_[0], abc_[1], rel_tol) && approx_rel(abc_[1], abc_[2], rel_tol) &&
               approx_rel(abc_[0], abc_[2], rel_tol);
    }

    friend bool operator==(const Metric&, const Metric&) = default;

private:
    std::array<double, 3> abc_;
};

/// A metric reordered so that a >= b >= c, with the permutation that produced it:
/// sorted.params()[i] == original.params()[perm[i]].
struct SortedMetric {
    Metric metric;
    std::array<int, 3> perm;
};

inline SortedMetric sort_descending(const Metric& m) {
    std::array<int, 3> perm{0, 1, 2};
    const auto& p = m.params();
    // stable so that ties keep their original order
    std::stable_sort(perm.begin(), perm.end(), [&](int i, int j) { return p[i] > p[j]; });
    return {m.permuted(perm), perm};
}

/// The diagonal shift C = (ab/c + bc/a + ca/b) / 2 common to every level operator.
inline double shift_C(const Metric& m) noexcept {
    const double a = m.a(), b = m.b(), c = m.c();
    return 0.5 * (a * b / c + b * c / a + c * a / b);
}

/// mu = a + b + c - C; the smallest |eigenvalue| on S^3 when scal > 0.
inline double mu(const Metric& m) noexcept { return m.a() + m.b() + m.c() - shift_C(m); }

struct MetricInvariants {
    double C;
    double mu;
    double scal;
    double volS3;
    double volSO3;
    // elementary symmetric polynomials in a, b, c
    double s1, s2, s3;
    // elementary symmetric polynomials in a^2, b^2, c^2
    double sigma1, sigma2, sigma3;
    // sectional curvatures of the coordinate planes of the Milnor frame
    double K12, K23, K31;
    double ricNormSq;
    double riemNormSq;
    double a2tilde; // 8 |Ric|^2 + 7 |Riem|^2
};

/// Curvature norms evaluated from the elementary symmetric polynomials of (a^2, b^2, c^2).
/// The expressions cancel heavily, so they are evaluated in extended precision.
struct SigmaCurvatureNorms {
    double ricNormSq;
    double riemNormSq;
};

inline SigmaCurvatureNorms curvature_norms_from_sigma(const Metric& m) noexcept {
    const long double a2 = static_cast<long double>(m.a()) * m.a();
    const long double b2 = static_cast<long double>(m.b()) * m.b();
    const long double c2 = static_cast<long double>(m.c()) * m.c();
    const long double s1 = a2 + b2 + c2;
    const long double s2 = a2 * b2 + b2 * c2 + c2 * a2;
    const long double s3 = a2 * b2 * c2;
    const long double q = s2 * s2 / s3;
    const long double ric = 64 * s1 * s1 - 64 * s1 * q + 12 * q * q + 64 * s2;
    const long double riem = 192 * s1 * s1 - 224 * s1 * q + 44 * q * q + 256 * s2;
    return {static_cast<double>(ric), static_cast<double>(riem)};
}

inline double volume(const Metric& m, Space space) noexcept {
    const double base = space == Space::S3 ? 2.0 * std::numbers::pi * std::numbers::pi
                                           : std::numbers::pi * std::numbers::pi;
    return base / (m.a() * m.b() * m.c());
}

/// All closed-form invariants. The curvature norms are computed from the sectional
/// curvatures and cross-checked against the sigma-polynomial expressions.
inline MetricInvariants invariants(const Metric& m, double cross_check_tol = 1e-12) {
    using ld = long double;
    const ld a = m.a(), b = m.b(), c = m.c();
    const ld a2 = a * a, b2 = b * b, c2 = c * c;
    const ld ab_c = a2 * b2 / c2, bc_a = b2 * c2 / a2, ca_b = c2 * a2 / b2;

    MetricInvariants inv{};
    const ld C = (a * b / c + b * c / a + c * a / b) / 2;
    inv.C = static_cast<double>(C);
    inv.mu = static_cast<double>(a + b + c - C);
    inv.scal = static_cast<double>(8 * (a2 + b2 + c2 - C * C));
    inv.volS3 = volume(m, Space::S3);
    inv.volSO3 = volume(m, Space::SO3);
    inv.s1 = static_cast<double>(a + b + c);
    inv.s2 = static_cast<double>(a * b + b * c + c * a);
    inv.s3 = static_cast<double>(a * b * c);
    inv.sigma1 = static_cast<double>(a2 + b2 + c2);
    inv.sigma2 = static_cast<double>(a2 * b2 + b2 * c2 + c2 * a2);
    inv.sigma3 = static_cast<double>(a2 * b2 * c2);

    const ld K12 = 2 * (a2 + b2 - c2) + bc_a + ca_b - 3 * ab_c;
    const ld K23 = 2 * (b2 + c2 - a2) + ca_b + ab_c - 3 * bc_a;
    const ld K31 = 2 * (c2 + a2 - b2) + ab_c + bc_a - 3 * ca_b;
    inv.K12 = static_cast<double>(K12);
    inv.K23 = static_cast<double>(K23);
    inv.K31 = static_cast<double>(K31);
    const ld ric = (K12 + K23) * (K12 + K23) + (K23 + K31) * (K23 + K31) + (K31 + K12) * (K31 + K12);
    const ld riem = 4 * (K12 * K12 + K23 * K23 + K31 * K31);
    inv.ricNormSq = static_cast<double>(ric);
    inv.riemNormSq = static_cast<double>(riem);
    inv.a2tilde = static_cast<double>(8 * ric + 7 * riem);

    const auto sigma = curvature_norms_from_sigma(m);
    if (!approx_rel(sigma.ricNormSq, inv.ricNormSq, cross_check_tol) ||
        !approx_rel(sigma.riemNormSq, inv.riemNormSq, cross_check_tol)) {
        throw Error(Errc::Consistency, "curvature norms disagree between sectional-curvature and "
                                       "symmetric-polynomial evaluation");
    }
    return inv;
}

/// (a2tilde - 101 scal^2) / 576, which equals -scal*sigma1 + 4*sigma2.
inline double heat_discriminant_Y(const MetricInvariants& inv) noexcept {
    return (inv.a2tilde - 101.0 * inv.scal * inv.scal) / 576.0;
}

/// Small-time heat-trace coefficients of D^2: Tr exp(-tD^2) ~ (4 pi t)^{-3/2} (a0 + a1 t + a2 t^2 + ...).
struct HeatInvariants {
    static constexpr int dimSigma = 2; // complex spinors in dimension 3
    double a0;
    double a1;
    double a2;
};

inline HeatInvariants heat_invariants(const Metric& m, Space space) {
    const auto inv = invariants(m);
    const double vol = space == Space::S3 ? inv.volS3 : inv.volSO3;
    constexpr double d = HeatInvariants::dimSigma;
    return {
        d * vol,
        -(d / 12.0) * inv.scal * vol,
        (d / 1440.0) * (5.0 * inv.scal * inv.scal - 8.0 * inv.ricNormSq - 7.0 * inv.riemNormSq) * vol,
    };
}

enum class ScalSign { Negative, Zero, Positive };

inline std::string_view to_string(ScalSign s) {
    switch (s) {
    case ScalSign::Negative: return "negative";
    case ScalSign::Zero: return "zero";
    case ScalSign::Positive: return "positive";
    }
    return "unknown";
}

/// Sign of scal from its factorisation
///   scal = 2/(abc)^2 (ab+bc+ca)(ab+bc-ca)(ab-bc+ca)(-ab+bc+ca).
/// At most one of the last three factors can be negative, so the sign is that of the smallest.
inline ScalSign scal_sign(const Metric& m, double zero_tol = 1e-12) noexcept {
    const double ab = m.a() * m.b(), bc = m.b() * m.c(), ca = m.c() * m.a();
    const double smallest = std::min({ab + bc - ca, ab - bc + ca, -ab + bc + ca});
    if (std::abs(smallest) < zero_tol * (ab + bc + ca)) return ScalSign::Zero;
    return smallest > 0.0 ? ScalSign::Positive : ScalSign::Negative;
}

} // namespace diracs3
