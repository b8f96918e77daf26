#pragma once

// Shared helpers for the test binaries.  Oracles here are deliberately
// independent of the library's computation paths.

#include <cmath>
#include <functional>
#include <vector>

#include "solreg/dataio.hpp"
#include "solreg/rng.hpp"

namespace testutil {

inline solreg::Dataset random_dataset(std::size_t n, std::uint64_t seed,
                                      const std::function<double(const double*)>& target,
                                      double lo = -1.0, double hi = 1.0) {
    solreg::Rng rng(seed);
    solreg::Dataset d;
    d.columns = solreg::default_schema();
    d.n = n;
    d.features.resize(n * solreg::Dataset::kNumFeatures);
    d.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < solreg::Dataset::kNumFeatures; ++j)
            d.features[i * solreg::Dataset::kNumFeatures + j] = rng.uniform(lo, hi);
        d.targets[i] = target(d.row(i));
    }
    return d;
}

// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> finite_difference(const std::function<double(const std::vector<double>&)>& f,
                                             std::vector<double> theta, double h = 1e-6) {
    std::vector<double> grad(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double saved = theta[k];
        theta[k] = saved + h;
        const double fp = f(theta);
        theta[k] = saved - h;
        const double fm = f(theta);
        theta[k] = saved;
        grad[k] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

// Max relative error between two gradients, with an absolute floor so
// near-zero components do not explode the ratio.
inline double max_relative_error(const std::vector<double>& a, const std::vector<double>& b,
                                 double floor = 1e-8) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double denom = std::max({std::abs(a[k]), std::abs(b[k]), floor});
        worst = std::max(worst, std::abs(a[k] - b[k]) / denom);
    }
    return worst;
}

// Dense least squares via Householder QR; the independent oracle for the
// damped normal-equation solver.  A is m x n row-major, m >= n.
inline std::vector<double> qr_least_squares(std::vector<double> A, std::vector<double> b,
                                            std::size_t m, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) norm += A[i * n + k] * A[i * n + k];
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        if (A[k * n + k] > 0.0) norm = -norm;
        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = A[i * n + k];
        v[0] -= norm;
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < m; ++i) dot += v[i - k] * A[i * n + j];
            const double scale = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < m; ++i) A[i * n + j] -= scale * v[i - k];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < m; ++i) dot += v[i - k] * b[i];
        const double scale = 2.0 * dot / vnorm2;
        for (std::size_t i = k; i < m; ++i) b[i] -= scale * v[i - k];
    }
    std::vector<double> x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= A[ii * n + j] * x[j];
        x[ii] = A[ii * n + ii] != 0.0 ? s / A[ii * n + ii] : 0.0;
    }
    return x;
}

} // namespace testutil
