#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "diracs3/diracs3.hpp"

namespace testing_support {

/// Metric with log-uniform parameters in [lo, hi].
inline diracs3::Metric random_metric(std::mt19937_64& rng, double lo = 0.25, double hi = 4.0) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return {std::exp(u(rng)), std::exp(u(rng)), std::exp(u(rng))};
}

/// Rejection sampling on the sign of the scalar curvature.
inline diracs3::Metric random_metric_with(std::mt19937_64& rng, diracs3::ScalSign want, double lo = 0.25,
                                          double hi = 4.0) {
    for (;;) {
        const auto m = random_metric(rng, lo, hi);
        if (diracs3::scal_sign(m) == want) return m;
    }
}

/// Metric with scal = 0 on the factor ab - bc - ca = 0, i.e. c = ab / (a + b).
inline diracs3::Metric random_flat_scal_metric(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.3, 3.0);
    const double a = u(rng), b = u(rng);
    return {a, b, a * b / (a + b)};
}

inline Eigen::MatrixXd dense(const diracs3::DiracBlock& b) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(b.size(), b.size());
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) M(i, j) = b.entry(i, j);
    return M;
}

/// Eigenvalues of a real matrix with real spectrum, ascending (dense general solver).
inline std::vector<double> dense_eigenvalues(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
    std::vector<double> v;
    for (int i = 0; i < M.rows(); ++i) v.push_back(es.eigenvalues()[i].real());
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace testing_support
