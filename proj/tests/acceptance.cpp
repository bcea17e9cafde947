// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace diracs3;
using testing_support::random_metric;
using testing_support::random_metric_with;

namespace {

constexpr double pi = std::numbers::pi;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
};

std::string str(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string metric_str(const Metric& m) {
    std::ostringstream s;
    s.precision(17);
    s << "(" << m.a() << "," << m.b() << "," << m.c() << ")";
    return s.str();
}

bool rel_ok(double got, double want, double tol) { return std::abs(got - want) <= tol * std::max(1.0, std::abs(want)); }

// real roots of a polynomial with real spectrum (leading coefficient first), ascending,
// from the companion matrix and then Newton-polished on the polynomial itself
std::vector<double> poly_real_roots(const std::vector<double>& p) {
    const int deg = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int j = 0; j < deg; ++j) comp(0, j) = -p[j + 1] / p[0];
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    auto roots = testing_support::dense_eigenvalues(comp);
    const auto dp = poly_derivative(p);
    for (double& r : roots) {
        for (int it = 0; it < 3; ++it) {
            const double d = poly_eval(dp, r);
            if (d == 0.0) break;
            const double next = r - poly_eval(p, r) / d;
            if (std::abs(poly_eval(p, next)) >= std::abs(poly_eval(p, r))) break;
            r = next;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

Outcome round_metric() {
    Outcome o;
    const Metric m(1, 1, 1);
    const auto inv = invariants(m);
    o.require(rel_ok(inv.C, 1.5, 1e-12), "C = " + str(inv.C));
    o.require(rel_ok(inv.mu, 1.5, 1e-12), "mu = " + str(inv.mu));
    o.require(rel_ok(inv.scal, 6.0, 1e-12), "scal = " + str(inv.scal));
    o.require(rel_ok(inv.volS3, 2 * pi * pi, 1e-12), "vol = " + str(inv.volS3));
    const auto r = smallest(m, Manifold::S3);
    o.require(rel_ok(r.value, 1.5, 1e-12) && r.multiplicityOfDSquared == 4 && r.certified,
              "smallest = " + str(r.value) + " x" + std::to_string(r.multiplicityOfDSquared));
    SmallestOptions off;
    off.certification = Certification::Off;
    off.maxLevel = 25;
    const auto e = smallest(m, Manifold::S3, off);
    o.require(rel_ok(e.value, 1.5, 1e-12) && e.multiplicityOfDSquared == 4,
              "enumerated = " + str(e.value) + " x" + std::to_string(e.multiplicityOfDSquared));
    return o;
}

Outcome boundary_table() {
    Outcome o;
    const Metric m(1, 1, 0.5);
    const double C = shift_C(m), M = mu(m);
    o.require(std::abs(C * C - 2.25) <= 1e-12, "C^2 = " + str(C * C));
    o.require(std::abs(M * M - 1.0) <= 1e-12, "mu^2 = " + str(M * M));
    const double want[] = {0.25, 0.0, 0.25, 1.0};
    for (int n = 2; n <= 5; ++n) {
        const double g = closed_form_G(m, n, 0);
        o.require(std::abs(g - want[n - 2]) <= 1e-12, "G(" + std::to_string(n) + ",0) = " + str(g));
    }
    const double scal = invariants(m).scal;
    o.require(std::abs(scal) <= 1e-12 && scal_sign(m) == ScalSign::Zero, "scal = " + str(scal));
    return o;
}

Outcome theorem_property() {
    Outcome o;
    std::mt19937_64 rng(1001);
    for (int i = 0; i < 1000 && o.ok; ++i) {
        const auto m = random_metric_with(rng, ScalSign::Positive);
        // the S^3 enumeration holds both SO(3) spectra: even levels and odd levels
        const auto s = assemble(m, Manifold::S3, 25);
        const double M = mu(m), C = shift_C(m);
        double lo_all = INFINITY, lo_even = INFINITY, lo_odd = INFINITY;
        for (const auto& l : s.lines) {
            const double v = std::abs(l.eigenvalue);
            lo_all = std::min(lo_all, v);
            (l.level % 2 == 0 ? lo_even : lo_odd) = std::min(l.level % 2 == 0 ? lo_even : lo_odd, v);
        }
        long long mult_all = 0, mult_even = 0, mult_odd = 0;
        for (const auto& l : s.lines) {
            const double v = std::abs(l.eigenvalue);
            if (std::abs(v - lo_all) <= 1e-9 * C) mult_all += l.totalMultiplicity;
            if (l.level % 2 == 0 && std::abs(v - lo_even) <= 1e-9 * C) mult_even += l.totalMultiplicity;
            if (l.level % 2 == 1 && std::abs(v - lo_odd) <= 1e-9 * C) mult_odd += l.totalMultiplicity;
        }
        const std::string where = metric_str(m);
        o.require(rel_ok(lo_all, M, 1e-9), "S3 min " + str(lo_all) + " vs mu " + str(M) + " at " + where);
        o.require(rel_ok(lo_odd, M, 1e-9), "SO3-nontrivial min " + str(lo_odd) + " at " + where);
        o.require(rel_ok(lo_even, C, 1e-9), "SO3-trivial min " + str(lo_even) + " vs C " + str(C) + " at " + where);
        const long long expect_all = m.is_round(1e-9) ? 4 : 2;
        o.require(mult_all == expect_all && mult_even == 2 && mult_odd == 2,
                  "multiplicities " + std::to_string(mult_all) + "/" + std::to_string(mult_even) + "/" +
                      std::to_string(mult_odd) + " at " + where);
        const auto cert = smallest(m, Manifold::S3);
        o.require(cert.certified && rel_ok(cert.value, lo_all, 1e-9), "certification disagrees at " + where);
    }
    return o;
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937_64 rng(1002);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto m = random_metric(rng);
        for (int n = 0; n <= 12; ++n) {
            const auto rep = build_from_representation(m, n);
            for (auto tag : {BlockTag::A, BlockTag::B}) {
                const auto want = build_block(m, n, tag);
                const auto got = rep.block(tag, want.shift);
                for (int r = 0; r <= n; ++r)
                    for (int c = 0; c <= n; ++c) worst = std::max(worst, std::abs(got.entry(r, c) - want.entry(r, c)));
            }
        }
    }
    o.require(worst <= 1e-12, "max entry deviation " + str(worst));
    if (o.ok) o.detail = "max deviation " + str(worst);
    return o;
}

Outcome closed_forms() {
    Outcome o;
    std::mt19937_64 rng(1003);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto m = random_metric(rng);
        for (int n : {2, 4}) {
            const auto roots = poly_real_roots(char_poly_small_n(m, n));
            for (auto tag : {BlockTag::A, BlockTag::B}) {
                // A' and B' share the characteristic polynomial
                const auto e = eigenvalues(build_block(m, n, tag).unshifted());
                for (int j = 0; j <= n; ++j) worst = std::max(worst, std::abs(e[j] - roots[j]) / (1 + std::abs(roots[j])));
            }
        }
        for (int n : {1, 3}) {
            auto want = closed_form_eigs(m, n);
            std::sort(want.begin(), want.end());
            auto got = eigenvalues(build_block(m, n, BlockTag::A));
            const auto b = eigenvalues(build_block(m, n, BlockTag::B));
            got.insert(got.end(), b.begin(), b.end());
            std::sort(got.begin(), got.end());
            for (size_t j = 0; j < want.size(); ++j) worst = std::max(worst, std::abs(got[j] - want[j]) / (1 + std::abs(want[j])));
        }
    }
    o.require(worst <= 1e-10, "max deviation " + str(worst));
    if (o.ok) o.detail = "max deviation " + str(worst);
    return o;
}

Outcome gershgorin_suite() {
    Outcome o;
    std::mt19937_64 rng(1004);
    for (int i = 0; i < 20 && o.ok; ++i) {
        const auto m = random_metric(rng);
        const std::string where = metric_str(m);
        for (int n = 0; n <= 30; ++n) {
            double least = INFINITY;
            for (auto tag : {BlockTag::A, BlockTag::B}) {
                const auto blk = build_block(m, n, tag);
                const Eigen::MatrixXd M = testing_support::dense(blk);
                const Eigen::MatrixXd S = M * M;
                const double scale = 1 + S.cwiseAbs().maxCoeff();
                for (int k = 0; k <= n; ++k) {
                    const auto row = squared_row_entries(m, n, tag, k);
                    for (int off = 0; off < 5; ++off) {
                        const int j = k + off - 2;
                        const double want = j >= 0 && j <= n ? S(k, j) : 0.0;
                        o.require(std::abs(row[off] - want) <= 1e-12 * scale,
                                  "squared entry n=" + std::to_string(n) + " k=" + std::to_string(k) + " at " + where);
                    }
                }
                least = std::min(least, min_abs_eigenvalue(blk));
            }
            const double lo = min_row_bound(m, n);
            o.require(least * least >= lo - 1e-10 * (1 + std::abs(lo)), "eigenvalue below row bound at n=" + std::to_string(n));
            for (int k = 0; k <= n; ++k) {
                const double g = closed_form_G(m, n, k), gt = closed_form_G(m, n, n - k, GVariant::Gtilde);
                o.require(std::abs(g - gt) <= 1e-11 * (1 + std::abs(g)), "G != Gt reflected at n=" + std::to_string(n));
            }
        }
        const bool positive = scal_sign(m) == ScalSign::Positive;
        for (int n = 0; n <= 50; ++n)
            for (int k = 0; k <= n; ++k) {
                double d = 0.0;
                try {
                    d = triangle_increment(m, n, k);
                } catch (const Error& e) {
                    o.require(false, e.what());
                }
                if (positive) o.require(d > 0.0, "non-positive increment at n=" + std::to_string(n) + " " + where);
            }
    }
    return o;
}

Outcome inverse_round_trips() {
    Outcome o;
    std::mt19937_64 rng(1005);
    const std::array<Manifold, 3> mfs{Manifold::S3, Manifold::SO3Trivial, Manifold::SO3Nontrivial};
    auto check = [&](const Metric& m, Manifold mf, ReconstructionBranch want) {
        try {
            const auto r = reconstruct(spectral_data(m, mf));
            const auto s = sort_descending(m).metric;
            o.require(r.branch == want, "wrong branch at " + metric_str(m));
            for (int j = 0; j < 3; ++j)
                o.require(std::abs(r.triple[j] - s.params()[j]) <= 1e-8 * s.params()[j], "mismatch at " + metric_str(m));
        } catch (const Error& e) {
            o.require(false, std::string(e.what()) + " at " + metric_str(m));
        }
    };
    for (int i = 0; i < 1000; ++i) {
        const auto mf = mfs[i % 3];
        check(random_metric_with(rng, ScalSign::Positive), mf,
              mf == Manifold::SO3Trivial ? ReconstructionBranch::PositiveC : ReconstructionBranch::PositiveMu);
        check(random_metric_with(rng, ScalSign::Negative), mf, ReconstructionBranch::NegativeScal);
        check(testing_support::random_flat_scal_metric(rng), mf, ReconstructionBranch::ZeroScal);
    }
    return o;
}

Outcome berger() {
    Outcome o;
    for (double T : {1.2, 1.5, 1.8}) {
        const auto s = assemble(Metric(1 / T, 1, 1), Manifold::S3, 3);
        const double want = 2 - T / 2;
        bool found = false;
        for (const auto& l : s.lines)
            if (l.level == 1 && std::abs(l.eigenvalue - want) <= 1e-10) found = true;
        o.require(found, "missing " + str(want) + " for T=" + str(T));
    }
    return o;
}

Outcome heat_asymptotics() {
    Outcome o;
    const Metric m(1, 1, 1);
    double worst = 0.0;
    for (double t : {0.02, 0.05, 0.1}) {
        const auto h = heat_trace(m, Manifold::S3, t, 60);
        const double asym = heat_trace_asymptotic(m, Manifold::S3, t);
        worst = std::max(worst, rel_diff(h.value, asym));
        o.require(rel_diff(h.value, asym) < 0.01, "t=" + str(t) + ": " + str(h.value) + " vs " + str(asym));
        o.require(h.tailEstimate < 1e-10 * h.value, "tail " + str(h.tailEstimate) + " at t=" + str(t));
    }
    if (o.ok) o.detail = "max relative deviation " + str(worst);
    return o;
}

Outcome weyl() {
    Outcome o;
    const Metric m(1, 1, 1);
    const auto c = counting_function(m, Manifold::S3, 40.0, 60);
    const double want = 2.0 / 3.0 * 40 * 40 * 40;
    o.require(c.horizonSufficient, "level horizon too small");
    o.require(std::abs(c.count - want) <= 0.1 * want, "N(40) = " + std::to_string(c.count));
    if (o.ok) o.detail = "N(40) = " + std::to_string(c.count) + " vs " + str(want);
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "round-metric exactness", 1.0, round_metric},
        {2, "boundary-point table at (1,1,1/2)", 1.0, boundary_table},
        {3, "smallest |lambda| on 1000 positive-scal metrics", 120.0, theorem_property},
        {4, "representation oracle equivalence, n <= 12", 30.0, oracle_equivalence},
        {5, "closed-form and characteristic-polynomial cross-checks", 30.0, closed_forms},
        {6, "Gershgorin suite", 60.0, gershgorin_suite},
        {7, "inverse round-trips, 1000 per regime", 30.0, inverse_round_trips},
        {8, "Berger family at level 1", 1.0, berger},
        {9, "heat-trace asymptotics at the round metric", 10.0, heat_asymptotics},
        {10, "Weyl count at Lambda = 40", 10.0, weyl},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.ok && dt > c.budget_s) {
            o.ok = false;
            o.detail = "over time budget " + str(c.budget_s) + " s";
        }
        if (!o.ok) ++failures;
        std::printf("%s criterion %2d: %s (%.3f s)%s%s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, dt,
                    o.detail.empty() ? "" : " -- ", o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
