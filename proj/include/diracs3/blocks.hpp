#pragma once

// Level-n Dirac operators D_n acting on Hom(V_n, Sigma_3), where V_n is the (n+1)-dimensional
// irreducible SU(2) representation. In the basis {A_0..A_n, B_0..B_n} D_n splits into two real
// tridiagonal blocks; this header builds them from the explicit recurrences and, independently,
// by assembling the operator from the representation and Clifford matrices.

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "common.hpp"
#include "metric.hpp"

namespace diracs3 {

enum class BlockTag { A, B };

inline std::string_view to_string(BlockTag t) { return t == BlockTag::A ? "A" : "B"; }

/// Restriction of D_n to span{A_k} or span{B_k}: a real tridiagonal (n+1)x(n+1) matrix.
/// sub[k] = M(k+1, k) and super[k] = M(k, k+1).
struct DiracBlock {
    int level = 0;
    BlockTag tag = BlockTag::A;
    double shift = 0.0; // the C subtracted on the diagonal
    std::vector<double> diag;
    std::vector<double> sub;
    std::vector<double> super;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(diag.size()); }

    [[nodiscard]] double entry(int i, int j) const noexcept {
        if (i == j) return diag[i];
        if (i == j + 1) return sub[j];
        if (j == i + 1) return super[i];
        return 0.0;
    }

    [[nodiscard]] double max_norm() const noexcept {
        double m = 0.0;
        for (double v : diag) m = std::max(m, std::abs(v));
        for (double v : sub) m = std::max(m, std::abs(v));
        for (double v : super) m = std::max(m, std::abs(v));
        return m;
    }

    /// The block of D'_n = D_n + C, i.e. with the diagonal shift added back.
    [[nodiscard]] DiracBlock unshifted() const {
        DiracBlock out = *this;
        for (double& d : out.diag) d += shift;
        out.shift = 0.0;
        return out;
    }
};

/// Builds A_n = A'_n - C I or B_n = B'_n - C I from the three-term recurrences.
///
/// For the A block and even k,
///   D'_n(A_k) = (c-b)(n-k+1) A_{k-1} + a(n-2k) A_k + (c+b)(k+1) A_{k+1},
/// for odd k the roles of (c-b) and (c+b) swap and the diagonal flips sign.
/// The B block is the A block with the even/odd cases exchanged.
inline DiracBlock build_block(const Metric& m, int n, BlockTag tag) {
    if (n < 0) throw Error(Errc::Domain, "level must be non-negative");
    const double a = m.a(), b = m.b(), c = m.c();
    const double C = shift_C(m);
    const double plus = c + b, minus = c - b;

    DiracBlock blk;
    blk.level = n;
    blk.tag = tag;
    blk.shift = C;
    blk.diag.resize(n + 1);
    blk.sub.resize(n);
    blk.super.resize(n);
    for (int k = 0; k <= n; ++k) {
        // "even" column pattern: A with even k, B with odd k
        const bool even_pattern = (k % 2 == 0) == (tag == BlockTag::A);
        const double below = even_pattern ? plus : minus;  // coefficient of basis k+1
        const double above = even_pattern ? minus : plus;  // coefficient of basis k-1
        const double sign = even_pattern ? 1.0 : -1.0;
        blk.diag[k] = sign * a * (n - 2 * k) - C;
        if (k < n) blk.sub[k] = below * (k + 1);
        if (k > 0) blk.super[k - 1] = above * (n - k + 1);
    }
    return blk;
}

/// D_n as a dense complex matrix on Hom(V_n, Sigma_3), flattened in the order
/// {A_0, ..., A_n, B_0, ..., B_n}.
class RepresentationOperator {
public:
    RepresentationOperator(int level, std::vector<std::complex<double>> entries)
        : level_(level), dim_(2 * (level + 1)), entries_(std::move(entries)) {}

    [[nodiscard]] int level() const noexcept { return level_; }
    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] std::complex<double> operator()(int i, int j) const { return entries_[i * dim_ + j]; }

    /// Largest |Im| over all entries.
    [[nodiscard]] double max_imag() const noexcept {
        double m = 0.0;
        for (const auto& z : entries_) m = std::max(m, std::abs(z.imag()));
        return m;
    }

    /// Largest |entry| coupling the A and B subspaces.
    [[nodiscard]] double max_cross_coupling() const noexcept {
        const int N = level_ + 1;
        double m = 0.0;
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j)
                if ((i < N) != (j < N)) m = std::max(m, std::abs((*this)(i, j)));
        return m;
    }

    /// The real tridiagonal block on span{A_k} or span{B_k}. Throws Consistency if imaginary
    /// parts, entries outside the tridiagonal band, or A/B coupling exceed tol.
    [[nodiscard]] DiracBlock block(BlockTag tag, double shift, double tol = 1e-12) const {
        const int N = level_ + 1;
        const double scale = 1.0 + max_abs();
        if (max_imag() > tol * scale || max_cross_coupling() > tol * scale) {
            throw Error(Errc::Consistency, "representation operator is not real block-diagonal at level " +
                                               std::to_string(level_));
        }
        const int off = tag == BlockTag::A ? 0 : N;
        DiracBlock blk;
        blk.level = level_;
        blk.tag = tag;
        blk.shift = shift;
        blk.diag.resize(N);
        blk.sub.resize(level_);
        blk.super.resize(level_);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) {
                const double v = (*this)(off + i, off + j).real();
                if (i == j) blk.diag[i] = v;
                else if (i == j + 1) blk.sub[j] = v;
                else if (j == i + 1) blk.super[i] = v;
                else if (std::abs(v) > tol * scale)
                    throw Error(Errc::Consistency, "representation block is not tridiagonal");
            }
        }
        return blk;
    }

private:
    [[nodiscard]] double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& z : entries_) m = std::max(m, std::abs(z));
        return m;
    }

    int level_;
    int dim_;
    std::vector<std::complex<double>> entries_;
};

/// Assembles D_n(f) = -sum_l e_l . f o pi_n*(X_l) - C f directly from the derived representation
/// on V_n = span{z^{n-k} w^k} and the Clifford matrices of e_1, e_2, e_3 on Sigma_3 = C^2.
/// (The curvature term enters as -C f because e_1 e_2 e_3 acts as -1.)
inline RepresentationOperator build_from_representation(const Metric& m, int n) {
    if (n < 0) throw Error(Errc::Domain, "level must be non-negative");
    using cd = std::complex<double>;
    constexpr cd I{0.0, 1.0};
    const int N = n + 1;
    const int dim = 2 * N;
    const double a = m.a(), b = m.b(), c = m.c();
    const double C = shift_C(m);

    // pi_n*(X_l) on the basis P_k: column k holds the image of P_k
    std::array<std::vector<cd>, 3> pi;
    for (auto& p : pi) p.assign(static_cast<size_t>(N) * N, cd{});
    auto at = [N](std::vector<cd>& p, int row, int col) -> cd& { return p[row * N + col]; };
    for (int k = 0; k <= n; ++k) {
        at(pi[0], k, k) = a * I * double(n - 2 * k);
        if (k > 0) {
            at(pi[1], k - 1, k) = b * double(k);
            at(pi[2], k - 1, k) = c * I * double(k);
        }
        if (k < n) {
            at(pi[1], k + 1, k) = -b * double(n - k);
            at(pi[2], k + 1, k) = c * I * double(n - k);
        }
    }

    using Mat2 = std::array<std::array<cd, 2>, 2>;
    const std::array<Mat2, 3> clifford{{
        {{{I, 0.0}, {0.0, -I}}},
        {{{0.0, 1.0}, {-1.0, 0.0}}},
        {{{0.0, I}, {I, 0.0}}},
    }};

    // Basis element j is the 2 x N unit matrix with a 1 at (spinor_row(j), column(j)).
    auto column = [N](int j) { return j < N ? j : j - N; };
    auto spinor_row = [N](int j) {
        const int k = j < N ? j : j - N;
        const bool a_basis = j < N;
        return (k % 2 == 0) == a_basis ? 0 : 1; // Z_1 for A with even k or B with odd k
    };

    std::vector<cd> D(static_cast<size_t>(dim) * dim, cd{});
    for (int j = 0; j < dim; ++j) {
        const int r = spinor_row(j), k = column(j);
        // image F' = -sum_l E_l F Pi_l - C F, with F = unit(r, k); (F Pi)[r, :] = Pi[k, :]
        std::vector<cd> image(static_cast<size_t>(2) * N, cd{});
        for (int l = 0; l < 3; ++l) {
            for (int col = 0; col < N; ++col) {
                const cd fp = pi[l][k * N + col];
                if (fp == cd{}) continue;
                for (int s = 0; s < 2; ++s) image[s * N + col] -= clifford[l][s][r] * fp;
            }
        }
        image[r * N + k] -= C;
        for (int i = 0; i < dim; ++i) D[i * dim + j] = image[spinor_row(i) * N + column(i)];
    }
    return {n, std::move(D)};
}

/// Characteristic polynomial of A'_n (equal to that of B'_n) for n = 2 and n = 4,
/// coefficients listed from the leading one down to the constant term.
inline std::vector<double> char_poly_small_n(const Metric& m, int n) {
    const double a = m.a(), b = m.b(), c = m.c();
    const double s = a * a + b * b + c * c;
    const double abc = a * b * c;
    if (n == 2) return {1.0, 0.0, -4.0 * s, -16.0 * abc};
    if (n == 4) {
        const double quartic = a * a * a * a + b * b * b * b + c * c * c * c +
                               4.0 * (a * a * b * b + b * b * c * c + c * c * a * a);
        return {1.0, 0.0, -20.0 * s, -80.0 * abc, 64.0 * quartic, 768.0 * abc * s};
    }
    throw Error(Errc::UnsupportedLevel, "characteristic polynomial available only for n = 2, 4; got " +
                                            std::to_string(n));
}

/// Horner evaluation of a polynomial given leading coefficient first.
inline double poly_eval(const std::vector<double>& coeffs, double x) noexcept {
    double r = 0.0;
    for (double c : coeffs) r = r * x + c;
    return r;
}

/// Coefficients of p', leading coefficient first.
inline std::vector<double> poly_derivative(const std::vector<double>& coeffs) {
    std::vector<double> d;
    const int deg = static_cast<int>(coeffs.size()) - 1;
    for (int i = 0; i < deg; ++i) d.push_back(coeffs[i] * (deg - i));
    return d;
}

/// Closed-form eigenvalues of D_n for n = 1 (four values) and n = 3 (eight values).
/// For n = 3 the order is: four A-block values, then four B-block values, each as
/// (linear part) -/+ 2 sqrt(...) minus C.
inline std::vector<double> closed_form_eigs(const Metric& m, int n) {
    const double a = m.a(), b = m.b(), c = m.c();
    const double C = shift_C(m);
    if (n == 1) return {a + b + c - C, a - b - c - C, -a + b - c - C, -a - b + c - C};
    if (n == 3) {
        const double q = a * a + b * b + c * c;
        const double r1 = 2.0 * std::sqrt(q - a * b + b * c + c * a);
        const double r2 = 2.0 * std::sqrt(q + a * b + b * c - c * a);
        const double r3 = 2.0 * std::sqrt(q - a * b - b * c - c * a);
        const double r4 = 2.0 * std::sqrt(q + a * b - b * c + c * a);
        return {
            a + b - c - r1 - C,  a + b - c + r1 - C,  a - b + c - r2 - C,  a - b + c + r2 - C,
            -a - b - c - r3 - C, -a - b - c + r3 - C, -a + b + c - r4 - C, -a + b + c + r4 - C,
        };
    }
    throw Error(Errc::UnsupportedLevel, "closed-form eigenvalues available only for n = 1, 3; got " +
                                            std::to_string(n));
}

} // namespace diracs3
