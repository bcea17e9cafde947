#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace diracs3 {

/// Error categories raised by the library. Every failure path maps to exactly one.
enum class Errc {
    Domain,               // a, b or c not strictly positive, bad level, bad tolerance
    UnsupportedLevel,     // closed forms requested at a level that has none
    Consistency,          // two independent computations disagree
    Structural,           // block violates the symmetrizability sign condition
    Uncertifiable,        // certification requested where scal <= 0
    CertificationFailure, // an inequality of the certification chain failed
    BaseCaseFailure,      // a base-case inequality failed
    InconsistentInput,    // reconstruction data admit no metric
    WrongRegime,          // reconstruction branch does not match the sign of scal
};

inline std::string_view to_string(Errc e) {
    switch (e) {
    case Errc::Domain: return "domain";
    case Errc::UnsupportedLevel: return "unsupported-level";
    case Errc::Consistency: return "consistency";
    case Errc::Structural: return "structural";
    case Errc::Uncertifiable: return "uncertifiable";
    case Errc::CertificationFailure: return "certification-failure";
    case Errc::BaseCaseFailure: return "base-case-failure";
    case Errc::InconsistentInput: return "inconsistent-input";
    case Errc::WrongRegime: return "wrong-regime";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Failure of an inequality in the certification chain, tagged with the offending (n, k).
/// k is -1 when the check is not row-specific.
class CheckFailure : public Error {
public:
    CheckFailure(Errc code, const std::string& what, int n, int k)
        : Error(code, what), n_(n), k_(k) {}
    [[nodiscard]] int level() const noexcept { return n_; }
    [[nodiscard]] int row() const noexcept { return k_; }

private:
    int n_;
    int k_;
};

/// The three spin manifolds. SO(3) carries two spin structures, collecting even or odd levels.
enum class Manifold { S3, SO3Trivial, SO3Nontrivial };

/// Underlying Riemannian manifold, which is all the volume depends on.
enum class Space { S3, SO3 };

constexpr Space space_of(Manifold m) noexcept {
    return m == Manifold::S3 ? Space::S3 : Space::SO3;
}

/// Whether level n contributes to the spectrum of the given manifold.
constexpr bool admits_level(Manifold m, int n) noexcept {
    switch (m) {
    case Manifold::S3: return true;
    case Manifold::SO3Trivial: return n % 2 == 0;
    case Manifold::SO3Nontrivial: return n % 2 == 1;
    }
    return false;
}

inline std::string_view to_string(Manifold m) {
    switch (m) {
    case Manifold::S3: return "s3";
    case Manifold::SO3Trivial: return "so3-trivial";
    case Manifold::SO3Nontrivial: return "so3-nontrivial";
    }
    return "unknown";
}

inline Manifold parse_manifold(std::string_view s) {
    if (s == "s3") return Manifold::S3;
    if (s == "so3-trivial") return Manifold::SO3Trivial;
    if (s == "so3-nontrivial") return Manifold::SO3Nontrivial;
    throw Error(Errc::Domain, "unknown manifold '" + std::string(s) + "'");
}

/// |x - y| <= tol * max(|x|, |y|), with exact equality always accepted.
inline bool approx_rel(double x, double y, double tol) noexcept {
    return x == y || std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
}

inline double rel_diff(double x, double y) noexcept {
    const double s = std::max(std::abs(x), std::abs(y));
    return s == 0.0 ? 0.0 : std::abs(x - y) / s;
}

} // namespace diracs3
