#pragma once

// Reference implementations used only by tests. They avoid the library's
// code paths: dense arithmetic, long double accumulation, textbook formulas.

#include "ksgm/data.hpp"
#include "ksgm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline std::vector<double> densify(const ksgm::sparse_vector &x, std::size_t dim) {
    std::vector<double> out(dim, 0.0);
    for (const ksgm::feature &f : x) {
        out[f.index] = f.value;
    }
    return out;
}

inline double dense_dot(const std::vector<double> &a, const std::vector<double> &b) {
    long double total = 0.0L;
    for (std::size_t i = 0; i < a.size(); ++i) {
        total += static_cast<long double>(a[i]) * b[i];
    }
    return static_cast<double>(total);
}

/// exp(-||x - y||^2 / (2 sigma^2)) from coordinate differences.
inline double gaussian(const std::vector<double> &x, const std::vector<double> &y, double sigma) {
    long double distance = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const long double d = static_cast<long double>(x[i]) - y[i];
        distance += d * d;
    }
    return static_cast<double>(std::exp(-distance / (2.0L * sigma * sigma)));
}

inline double hinge(double y, double a) { return a * y < 1.0 ? 1.0 - y * a : 0.0; }
inline double logistic(double y, double a) { return std::log1p(std::exp(-y * a)); }

/// Subgradient used by the primal reference: left derivative of the hinge, derivative of the logistic loss.
inline double hinge_slope(double y, double a) { return y * a < 1.0 || (y > 0.0 && y * a == 1.0) ? -y : 0.0; }
inline double logistic_slope(double y, double a) { return -y / (1.0 + std::exp(y * a)); }

inline double central_difference(const std::function<double(double)> &f, double a, double h) {
    return (f(a + h) - f(a - h)) / (2.0 * h);
}

inline double left_difference(const std::function<double(double)> &f, double a, double h) {
    return (f(a) - f(a - h)) / h;
}

/**
 * Stochastic gradient method on explicit weights in R^d for the linear
 * kernel, drawing indices from the same seeded stream as the trainer.
 */
inline std::vector<double> primal_sgm(const ksgm::dataset &data, bool logistic_loss, double eta, double theta,
                                      std::size_t iterations, std::uint64_t seed) {
    const std::size_t dim = data.dim();
    std::vector<std::vector<double>> dense;
    for (const ksgm::sample &s : data) {
        dense.push_back(densify(s.features, dim));
    }
    std::vector<double> w(dim, 0.0);
    ksgm::counter_rng rng{ ksgm::derive_seed(seed, 0) };
    for (std::size_t t = 1; t <= iterations; ++t) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(data.size()));
        const double step = eta * std::pow(static_cast<double>(t), -theta);
        const double y = data[j].label;
        const double margin = dense_dot(w, dense[j]);
        const double slope = logistic_loss ? logistic_slope(y, margin) : hinge_slope(y, margin);
        for (std::size_t d = 0; d < dim; ++d) {
            w[d] -= step * slope * dense[j][d];
        }
    }
    return w;
}

inline long double harmonic(std::size_t n) {
    long double total = 0.0L;
    for (std::size_t k = n; k >= 1; --k) {
        total += 1.0L / static_cast<long double>(k);
    }
    return total;
}

inline long double power_sum(double s, std::size_t t) {
    long double total = 0.0L;
    for (std::size_t k = t; k >= 1; --k) {
        total += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
    }
    return total;
}

/// sum_{k=1}^{t-1} k^-s / (t - k), accumulated smallest terms first.
inline long double weighted_harmonic(double s, std::size_t t) {
    std::vector<long double> terms;
    for (std::size_t k = 1; k < t; ++k) {
        terms.push_back(std::pow(static_cast<long double>(k), -static_cast<long double>(s)) /
                        static_cast<long double>(t - k));
    }
    std::sort(terms.begin(), terms.end());
    long double total = 0.0L;
    for (const long double v : terms) {
        total += v;
    }
    return total;
}

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = std::log(x[i]) - mx;
        sxy += dx * (std::log(y[i]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

}  // namespace oracle
