#pragma once

// Recovery of (a, b, c) up to permutation from spectral data.
//
// The volume fixes abc. With scal > 0 the smallest |eigenvalue| (mu on S^3 and on SO(3) with
// the nontrivial spin structure, C on SO(3) with the trivial one) closes the system; with
// scal <= 0 the combination 8|Ric|^2 + 7|Riem|^2 read off the third heat invariant does.
// In each case the elementary symmetric polynomials of (a, b, c) or of (a^2, b^2, c^2) are
// found first and the parameters are the roots of the corresponding cubic.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <variant>

#include "common.hpp"
#include "metric.hpp"

namespace diracs3 {

/// Roots of t^3 - s1 t^2 + s2 t - s3, sorted descending, all required real and positive.
///
/// A conjugate pair is replaced by the double root of the nearest cubic that has one; if that
/// cubic reproduces (s1, s2, s3) within rel_tol the result is accepted. This absorbs rounding in
/// data from metrics with two or three equal parameters, where the roots are ill-conditioned.
/// Anything else throws InconsistentInput.
inline std::array<double, 3> cubic_positive_roots(double s1, double s2, double s3, double rel_tol = 1e-9) {
    if (!(s1 > 0.0) || !(s2 > 0.0) || !(s3 > 0.0))
        throw Error(Errc::InconsistentInput, "symmetric polynomials must be positive");

    auto poly = [&](double t) { return ((t - s1) * t + s2) * t - s3; };
    auto dpoly = [&](double t) { return (3.0 * t - 2.0 * s1) * t + s2; };
    // Newton refinement; steps are kept local so a root next to a near-double root cannot
    // jump onto a different root
    auto polish = [&](double t) {
        for (int it = 0; it < 4; ++it) {
            const double d = dpoly(t);
            if (d == 0.0) break;
            const double next = t - poly(t) / d;
            if (std::abs(next - t) > 1e-6 * std::abs(t)) break;
            if (!(std::abs(poly(next)) < std::abs(poly(t)))) break;
            t = next;
        }
        return t;
    };

    auto backward_error = [&](const std::array<double, 3>& r) {
        const double e1 = r[0] + r[1] + r[2];
        const double e2 = r[0] * r[1] + r[1] * r[2] + r[2] * r[0];
        const double e3 = r[0] * r[1] * r[2];
        return std::max({rel_diff(e1, s1), rel_diff(e2, s2), rel_diff(e3, s3)});
    };

    // Nearest cubic with a double root t: t is a critical point of the polynomial (then e1 and
    // e2 match exactly and e3 is off by |poly(t)|), or s1/3 when there is none.
    auto double_root_near = [&](double guess) -> std::array<double, 3> {
        const double cd = s1 * s1 - 3.0 * s2;
        double t = s1 / 3.0;
        if (cd > 0.0) {
            const double r = std::sqrt(cd);
            const double lo = (s1 - r) / 3.0, hi = (s1 + r) / 3.0;
            t = std::abs(lo - guess) < std::abs(hi - guess) ? lo : hi;
        }
        return {t, t, s1 - 2.0 * t};
    };

    // depressed cubic x^3 + p x + q with t = x + s1/3
    const double shift = s1 / 3.0;
    const double p = s2 - s1 * s1 / 3.0;
    const double q = -2.0 * s1 * s1 * s1 / 27.0 + s1 * s2 / 3.0 - s3;

    std::array<double, 3> roots{};
    bool trig = false;
    if (p < 0.0) {
        const double r = 1.5 * q / p * std::sqrt(-3.0 / p);
        if (std::abs(r) <= 1.0) {
            const double amp = 2.0 * std::sqrt(-p / 3.0);
            const double phi = std::acos(r) / 3.0;
            std::array<double, 3> raw{}, pol{};
            for (int k = 0; k < 3; ++k) {
                raw[k] = shift + amp * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
                pol[k] = polish(raw[k]);
            }
            // polishing one member of a near-double pair but not the other can make things worse,
            // and a (near-)double root is only resolved to sqrt(eps) by either
            roots = backward_error(pol) <= backward_error(raw) ? pol : raw;
            std::sort(raw.begin(), raw.end());
            for (int k = 0; k < 2; ++k) {
                if (raw[k + 1] - raw[k] > 1e-6 * raw[2]) continue;
                const auto dbl = double_root_near(0.5 * (raw[k] + raw[k + 1]));
                if (backward_error(dbl) < backward_error(roots)) roots = dbl;
            }
            trig = true;
        }
    }
    if (!trig) {
        // one real root, then the quadratic factor
        double x;
        if (p < 0.0) {
            const double r = std::abs(1.5 * q / p * std::sqrt(-3.0 / p));
            x = -2.0 * std::copysign(1.0, q) * std::sqrt(-p / 3.0) * std::cosh(std::acosh(r) / 3.0);
        } else if (p > 0.0) {
            x = -2.0 * std::sqrt(p / 3.0) * std::sinh(std::asinh(1.5 * q / p * std::sqrt(3.0 / p)) / 3.0);
        } else {
            x = std::cbrt(-q);
        }
        const double t0 = polish(shift + x);
        if (!(t0 > 0.0)) throw Error(Errc::InconsistentInput, "cubic has a non-positive real root");
        const double sum = s1 - t0, prod = s3 / t0;
        const double disc = sum * sum - 4.0 * prod;
        if (disc >= 0.0) {
            const double big = 0.5 * (sum + std::copysign(std::sqrt(disc), sum));
            roots = {t0, polish(big), polish(big != 0.0 ? prod / big : 0.0)};
        } else {
            roots = double_root_near(0.5 * sum); // validated below
        }
    }

    std::sort(roots.begin(), roots.end(), std::greater<>());
    if (!(roots[2] > 0.0)) throw Error(Errc::InconsistentInput, "cubic has a non-positive root");
    const double e1 = roots[0] + roots[1] + roots[2];
    const double e2 = roots[0] * roots[1] + roots[1] * roots[2] + roots[2] * roots[0];
    const double e3 = roots[0] * roots[1] * roots[2];
    if (!approx_rel(e1, s1, rel_tol) || !approx_rel(e2, s2, rel_tol) || !approx_rel(e3, s3, rel_tol))
        throw Error(Errc::InconsistentInput, "cubic lacks three positive real roots");
    return roots;
}

struct MuValue {
    double value;
};
struct CValue {
    double value;
};
struct A2TildeValue {
    double value;
};
using Discriminator = std::variant<MuValue, CValue, A2TildeValue>;

struct ReconstructionInput {
    Manifold manifold;
    double volume;
    double scal;
    Discriminator discriminator;
};

enum class ReconstructionBranch { PositiveMu, PositiveC, ZeroScal, NegativeScal };

inline std::string_view to_string(ReconstructionBranch b) {
    switch (b) {
    case ReconstructionBranch::PositiveMu: return "positive-mu";
    case ReconstructionBranch::PositiveC: return "positive-C";
    case ReconstructionBranch::ZeroScal: return "zero-scal";
    case ReconstructionBranch::NegativeScal: return "negative-scal";
    }
    return "?";
}

/// Relative deviations of the inputs recomputed from the recovered metric.
struct ReconstructionResiduals {
    double volume;
    double scal; // relative to max(|scal|, scale of the metric squared)
    double discriminator;
};

struct ReconstructionResult {
    std::array<double, 3> triple; // a >= b >= c
    ReconstructionBranch branch;
    /// (s1, s2, s3) of (a, b, c) for the mu branch, (sigma1, sigma2, sigma3) of the squares otherwise.
    std::array<double, 3> symmetric;
    ReconstructionResiduals residuals;

    [[nodiscard]] Metric metric() const { return {triple[0], triple[1], triple[2]}; }
};

namespace detail {

/// abc from the volume of S^3 (2 pi^2 / abc) or SO(3) (pi^2 / abc).
inline double product_from_volume(Manifold manifold, double volume) {
    if (!(volume > 0.0) || !std::isfinite(volume)) throw Error(Errc::Domain, "volume must be positive");
    const double pi2 = std::numbers::pi * std::numbers::pi;
    return (space_of(manifold) == Space::S3 ? 2.0 * pi2 : pi2) / volume;
}

/// |scal| below this counts as zero: 1e-10 times the curvature scale (abc)^{2/3}.
inline double scal_zero_threshold(double abc) { return 1e-10 * std::cbrt(abc * abc); }

inline ReconstructionResiduals residuals_of(const std::array<double, 3>& t, const ReconstructionInput& in) {
    const Metric m(t[0], t[1], t[2]);
    const auto inv = invariants(m);
    const double vol = space_of(in.manifold) == Space::S3 ? inv.volS3 : inv.volSO3;
    const double curv_scale = std::max({std::abs(in.scal), std::cbrt(inv.sigma3), 1e-300});
    const double disc = std::visit(
        [&](auto d) -> double {
            using T = decltype(d);
            if constexpr (std::is_same_v<T, MuValue>) return rel_diff(inv.mu, d.value);
            else if constexpr (std::is_same_v<T, CValue>) return rel_diff(inv.C, d.value);
            else return rel_diff(inv.a2tilde, d.value);
        },
        in.discriminator);
    return {rel_diff(vol, in.volume), std::abs(inv.scal - in.scal) / curv_scale, disc};
}

inline std::array<double, 3> sqrt_each(std::array<double, 3> v) {
    for (double& x : v) x = std::sqrt(x);
    return v;
}

} // namespace detail

/// scal > 0 on S^3 or SO(3) with the nontrivial spin structure, from (volume, scal, mu).
/// s2 is the positive root of 4 mu s2^2 / s3 - 16 s2 - scal = 0 and s1 = mu/2 + s2^2 / (4 s3).
inline ReconstructionResult reconstruct_positive_mu(const ReconstructionInput& in) {
    const auto* d = std::get_if<MuValue>(&in.discriminator);
    if (!d) throw Error(Errc::WrongRegime, "positive-mu reconstruction needs mu");
    if (in.manifold == Manifold::SO3Trivial)
        throw Error(Errc::WrongRegime, "mu is not the smallest |eigenvalue| for SO(3) with the trivial spin structure");
    const double s3 = detail::product_from_volume(in.manifold, in.volume);
    if (!(in.scal > detail::scal_zero_threshold(s3))) throw Error(Errc::WrongRegime, "mu reconstruction requires scal > 0");
    const double mu_v = d->value;
    if (!(mu_v > 0.0)) throw Error(Errc::InconsistentInput, "mu must be positive when scal > 0");

    const double qa = 4.0 * mu_v / s3; // qa s2^2 - 16 s2 - scal = 0, qa > 0, product of roots < 0
    const double s2 = (16.0 + std::sqrt(256.0 + 4.0 * qa * in.scal)) / (2.0 * qa);
    if (!(s2 > 0.0)) throw Error(Errc::InconsistentInput, "no positive solution for s2");
    const double s1 = 0.5 * mu_v + s2 * s2 / (4.0 * s3);
    const auto roots = cubic_positive_roots(s1, s2, s3);
    return {roots, ReconstructionBranch::PositiveMu, {s1, s2, s3}, detail::residuals_of(roots, in)};
}

/// scal > 0 on SO(3) with the trivial spin structure, from (volume, scal, C):
/// sqrt(sigma3) = pi^2 / volume, sigma2 = 2 C sqrt(sigma3), sigma1 = scal/8 + C^2.
inline ReconstructionResult reconstruct_positive_C(const ReconstructionInput& in) {
    const auto* d = std::get_if<CValue>(&in.discriminator);
    if (!d) throw Error(Errc::WrongRegime, "positive-C reconstruction needs C");
    if (in.manifold != Manifold::SO3Trivial)
        throw Error(Errc::WrongRegime, "C is the smallest |eigenvalue| only for SO(3) with the trivial spin structure");
    const double abc = detail::product_from_volume(in.manifold, in.volume);
    if (!(in.scal > detail::scal_zero_threshold(abc))) throw Error(Errc::WrongRegime, "C reconstruction requires scal > 0");
    const double C = d->value;
    if (!(C > 0.0)) throw Error(Errc::InconsistentInput, "C must be positive");

    const double sigma3 = abc * abc;
    const double sigma2 = 2.0 * C * abc;
    const double sigma1 = in.scal / 8.0 + C * C;
    const auto squares = cubic_positive_roots(sigma1, sigma2, sigma3);
    const auto roots = detail::sqrt_each(squares);
    return {roots, ReconstructionBranch::PositiveC, {sigma1, sigma2, sigma3}, detail::residuals_of(roots, in)};
}

/// scal <= 0 on any of the three manifolds, from (volume, scal, a2tilde).
///
/// With Y = (a2tilde - 101 scal^2)/576 = -scal sigma1 + 4 sigma2 and scal = 8 sigma1 - 2 sigma2^2/sigma3:
/// for scal = 0, sigma2 = Y/4; for scal < 0, sigma2 is the unique positive root of
///   (2 scal / sigma3) x^2 - 32 x + (8 Y + scal^2) = 0.
/// sigma1 then follows from the scal formula.
inline ReconstructionResult reconstruct_nonpositive(const ReconstructionInput& in) {
    const auto* d = std::get_if<A2TildeValue>(&in.discriminator);
    if (!d) throw Error(Errc::WrongRegime, "nonpositive-scal reconstruction needs a2tilde");
    const double abc = detail::product_from_volume(in.manifold, in.volume);
    const double zero = detail::scal_zero_threshold(abc);
    if (in.scal > zero) throw Error(Errc::WrongRegime, "a2tilde reconstruction requires scal <= 0");

    const double sigma3 = abc * abc;
    const double Y = (d->value - 101.0 * in.scal * in.scal) / 576.0;
    const bool is_zero = std::abs(in.scal) <= zero;
    double sigma2;
    if (is_zero) {
        sigma2 = Y / 4.0;
    } else {
        // root that stays finite as scal -> 0; the other root is negative
        const double c0 = 8.0 * Y + in.scal * in.scal;
        const double disc = 1024.0 - 8.0 * in.scal * c0 / sigma3;
        if (!(disc >= 0.0)) throw Error(Errc::InconsistentInput, "quadratic for sigma2 has no real root");
        sigma2 = 2.0 * c0 / (32.0 + std::sqrt(disc));
    }
    if (!(sigma2 > 0.0)) throw Error(Errc::InconsistentInput, "no positive solution for sigma2");
    const double sigma1 = (in.scal + 2.0 * sigma2 * sigma2 / sigma3) / 8.0;
    const auto squares = cubic_positive_roots(sigma1, sigma2, sigma3);
    const auto roots = detail::sqrt_each(squares);
    return {roots, is_zero ? ReconstructionBranch::ZeroScal : ReconstructionBranch::NegativeScal,
            {sigma1, sigma2, sigma3}, detail::residuals_of(roots, in)};
}

/// Dispatches on the discriminator.
inline ReconstructionResult reconstruct(const ReconstructionInput& in) {
    return std::visit(
        [&](auto d) {
            using T = decltype(d);
            if constexpr (std::is_same_v<T, MuValue>) return reconstruct_positive_mu(in);
            else if constexpr (std::is_same_v<T, CValue>) return reconstruct_positive_C(in);
            else return reconstruct_nonpositive(in);
        },
        in.discriminator);
}

/// Forward map: the data a spectrum determines for the given metric, in the form the matching
/// branch consumes (mu or C when scal > 0, a2tilde otherwise).
inline ReconstructionInput spectral_data(const Metric& m, Manifold manifold) {
    const auto inv = invariants(m);
    const double vol = space_of(manifold) == Space::S3 ? inv.volS3 : inv.volSO3;
    Discriminator d = A2TildeValue{inv.a2tilde};
    if (inv.scal > detail::scal_zero_threshold(inv.s3)) {
        if (manifold == Manifold::SO3Trivial) d = CValue{inv.C};
        else d = MuValue{inv.mu};
    }
    return {manifold, vol, inv.scal, d};
}

} // namespace diracs3
