#pragma once

// Shared helpers for unit and acceptance tests: random datasets and
// brute-force oracles that do not call into the library's quantile code.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "conformal/rng.hpp"
#include "conformal/types.hpp"

namespace conformal::testing {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Rank by exact integer arithmetic: alpha is drawn as num / den so that
// ceil((n + 1)(1 - alpha)) = ceil((n + 1)(den - num) / den) has no rounding.
inline std::size_t exact_rank(std::size_t n, long long num, long long den) {
    const long long top = static_cast<long long>(n + 1) * (den - num);
    return static_cast<std::size_t>((top + den - 1) / den);
}

// Sort ascending and pick the k-th smallest (1-based), +inf past the end.
inline double sorted_pick(std::vector<double> values, std::size_t k) {
    std::sort(values.begin(), values.end());
    if (k > values.size()) return kInf;
    return values[k - 1];
}

inline Dataset random_regression(std::size_t n, std::size_t d, Rng& rng, double noise = 1.0) {
    Matrix x(n, d);
    std::vector<double> y(n);
    std::vector<double> w(d);
    for (auto& v : w) v = rng.normal();
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.5;
        for (std::size_t j = 0; j < d; ++j) {
            x(i, j) = rng.normal();
            t += w[j] * x(i, j);
        }
        y[i] = t + noise * rng.normal();
    }
    return Dataset::regression(std::move(x), std::move(y));
}

inline Matrix random_matrix(std::size_t n, std::size_t d, Rng& rng) {
    Matrix x(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x(i, j) = rng.normal();
    }
    return x;
}

inline std::vector<double> random_simplex(std::size_t k, Rng& rng) {
    std::vector<double> p(k);
    double sum = 0.0;
    for (auto& v : p) {
        v = -std::log(1.0 - rng.uniform());
        sum += v;
    }
    for (auto& v : p) v /= sum;
    return p;
}

}  // namespace conformal::testing
