#include <algorithm>
#include <complex>
#include <iostream>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace diracs3;
using testing_support::random_metric;

namespace {

// monic polynomial with the given roots, leading coefficient first
std::vector<double> poly_from_roots(const std::vector<double>& roots) {
    std::vector<double> p{1.0};
    for (double r : roots) {
        std::vector<double> q(p.size() + 1, 0.0);
        for (size_t i = 0; i < p.size(); ++i) {
            q[i] += p[i];
            q[i + 1] -= r * p[i];
        }
        p = q;
    }
    return p;
}

std::vector<double> both_blocks_dense(const Metric& m, int n) {
    auto a = testing_support::dense_eigenvalues(testing_support::dense(build_block(m, n, BlockTag::A)));
    const auto b = testing_support::dense_eigenvalues(testing_support::dense(build_block(m, n, BlockTag::B)));
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    return a;
}

} // namespace

TEST(Blocks, Shapes) {
    const auto b = build_block(Metric(1, 2, 3), 4, BlockTag::A);
    EXPECT_EQ(b.size(), 5);
    EXPECT_EQ(b.sub.size(), 4u);
    EXPECT_EQ(b.super.size(), 4u);
    EXPECT_THROW(build_block(Metric(1, 1, 1), -1, BlockTag::A), Error);
}

TEST(Blocks, RecurrenceEntriesByHand) {
    // a=3, b=2, c=1, n=2: C = (6 + 2/3 + 3/2)/2
    const Metric m(3, 2, 1);
    const double C = (6.0 + 2.0 / 3.0 + 1.5) / 2.0;
    const auto A = build_block(m, 2, BlockTag::A);
    // column k=0 (even): diag a*n - C, below (c+b)*1
    // column k=1 (odd): below (c-b)*2, above (c+b)*(n-k+1) = 3*2
    // column k=2 (even): above (c-b)*1
    EXPECT_DOUBLE_EQ(A.diag[0], 6 - C);
    EXPECT_DOUBLE_EQ(A.diag[1], -C);
    EXPECT_DOUBLE_EQ(A.diag[2], -6 - C);
    EXPECT_DOUBLE_EQ(A.sub[0], 3.0);
    EXPECT_DOUBLE_EQ(A.super[0], 3.0 * 2);
    EXPECT_DOUBLE_EQ(A.sub[1], -1.0 * 2);
    EXPECT_DOUBLE_EQ(A.super[1], -1.0 * 1);
    const auto B = build_block(m, 2, BlockTag::B);
    EXPECT_DOUBLE_EQ(B.diag[0], -6 - C);
    EXPECT_DOUBLE_EQ(B.sub[0], -1.0);
}

TEST(Blocks, LevelZeroIsMinusC) {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
        const auto m = random_metric(rng);
        for (auto tag : {BlockTag::A, BlockTag::B}) {
            const auto b = build_block(m, 0, tag);
            ASSERT_EQ(b.size(), 1);
            EXPECT_DOUBLE_EQ(b.diag[0], -shift_C(m));
        }
    }
}

TEST(Blocks, RepresentationOracleAgrees) {
    std::mt19937_64 rng(22);
    for (int i = 0; i < 30; ++i) {
        const auto m = random_metric(rng);
        for (int n = 0; n <= 12; ++n) {
            const auto rep = build_from_representation(m, n);
            EXPECT_LE(rep.max_imag(), 1e-12 * (1 + shift_C(m) + n));
            EXPECT_LE(rep.max_cross_coupling(), 1e-12 * (1 + shift_C(m) + n));
            for (auto tag : {BlockTag::A, BlockTag::B}) {
                const auto want = build_block(m, n, tag);
                const auto got = rep.block(tag, want.shift);
                for (int r = 0; r <= n; ++r)
                    for (int c = 0; c <= n; ++c)
                        ASSERT_NEAR(got.entry(r, c), want.entry(r, c), 1e-12 * (1 + want.max_norm()))
                            << "n=" << n << " tag=" << to_string(tag) << " (" << r << "," << c << ")";
            }
        }
    }
}

TEST(Blocks, RepresentationBlockRejectsCoupling) {
    const int n = 2, dim = 2 * (n + 1);
    std::vector<std::complex<double>> e(dim * dim, 0.0);
    e[0 * dim + 4] = 1.0; // couples A_0 with B_1
    RepresentationOperator op(n, e);
    EXPECT_THROW(op.block(BlockTag::A, 0.0), Error);
    std::vector<std::complex<double>> f(dim * dim, 0.0);
    f[0] = {0.0, 1.0};
    EXPECT_THROW(RepresentationOperator(n, f).block(BlockTag::A, 0.0), Error);
    std::vector<std::complex<double>> g(dim * dim, 0.0);
    g[0 * dim + 2] = 1.0; // outside the band
    EXPECT_THROW(RepresentationOperator(n, g).block(BlockTag::A, 0.0), Error);
}

TEST(Blocks, CharPolyRoundMetricByHand) {
    const Metric m(1, 1, 1);
    EXPECT_EQ(char_poly_small_n(m, 2), (std::vector<double>{1, 0, -12, -16}));
    // s = 3, abc = 1, a^4+b^4+c^4 + 4(a^2b^2+...) = 15
    EXPECT_EQ(char_poly_small_n(m, 4), (std::vector<double>{1, 0, -60, -80, 960, 2304}));
    EXPECT_THROW(char_poly_small_n(m, 3), Error);
    try {
        char_poly_small_n(m, 6);
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::UnsupportedLevel);
    }
}

TEST(Blocks, CharPolyMatchesBothUnshiftedBlocks) {
    std::mt19937_64 rng(23);
    for (int i = 0; i < 100; ++i) {
        const auto m = random_metric(rng);
        for (int n : {2, 4}) {
            const auto chi = char_poly_small_n(m, n);
            for (auto tag : {BlockTag::A, BlockTag::B}) {
                const auto blk = build_block(m, n, tag).unshifted();
                const auto got = poly_from_roots(eigenvalues(blk));
                ASSERT_EQ(got.size(), chi.size());
                double scale = 0;
                for (double c : chi) scale = std::max(scale, std::abs(c));
                for (size_t j = 0; j < chi.size(); ++j) EXPECT_NEAR(got[j], chi[j], 1e-10 * scale) << "n=" << n << " j=" << j;
            }
        }
    }
}

TEST(Blocks, ClosedFormEigenvalues) {
    std::mt19937_64 rng(24);
    for (int i = 0; i < 100; ++i) {
        const auto m = random_metric(rng);
        for (int n : {1, 3}) {
            auto want = closed_form_eigs(m, n);
            std::sort(want.begin(), want.end());
            const auto got = both_blocks_dense(m, n);
            ASSERT_EQ(got.size(), want.size());
            for (size_t j = 0; j < want.size(); ++j) EXPECT_NEAR(got[j], want[j], 1e-10 * (1 + std::abs(want[j])));
        }
    }
    EXPECT_THROW(closed_form_eigs(Metric(1, 1, 1), 2), Error);
}

TEST(Blocks, ClosedFormLevelOneContainsMu) {
    const Metric m(2, 1, 1);
    const auto e = closed_form_eigs(m, 1);
    EXPECT_DOUBLE_EQ(e[0], mu(m));
}

TEST(Blocks, PolyHelpers) {
    const std::vector<double> p{1, -3, 2}; // (x-1)(x-2)
    EXPECT_DOUBLE_EQ(poly_eval(p, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(poly_eval(p, 3.0), 2.0);
    EXPECT_EQ(poly_derivative(p), (std::vector<double>{2, -3}));
}

// Exploratory, not asserted: do A'_n and B'_n share their spectrum for every even n?
TEST(Exploratory, UnshiftedBlocksCoincideForEvenLevels) {
    std::mt19937_64 rng(25);
    for (int n = 2; n <= 20; n += 2) {
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const auto m = random_metric(rng);
            const auto a = eigenvalues(build_block(m, n, BlockTag::A).unshifted());
            const auto b = eigenvalues(build_block(m, n, BlockTag::B).unshifted());
            for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(a[j] - b[j]) / (1 + std::abs(a[j])));
        }
        std::cout << "[ explore  ] n=" << n << " max |spec A' - spec B'| = " << worst << "\n";
        RecordProperty("n" + std::to_string(n), std::to_string(worst));
    }
}
