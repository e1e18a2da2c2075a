#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>

#include "conformal/types.hpp"

namespace conformal {

/// y = b + w.x + noise, x ~ N(0, I_d); b and w drawn from N(0, 1).
struct LinearGaussian {
    std::size_t n = 100;
    std::size_t d = 1;
    double noise_sigma = 1.0;
};

/// One feature x ~ U(0, 5), y = 2x + 1 + (0.1 + 0.5x) * N(0, 1).
struct Heteroscedastic {
    enum class NoiseScale { linear_in_x };
    std::size_t n = 100;
    NoiseScale noise_scale = NoiseScale::linear_in_x;
};

/// Balanced isotropic unit-variance Gaussian clusters. Class c is centred
/// at separation * (cos 2pi c/C, sin 2pi c/C, 0, ...) for d >= 2 and at
/// separation * c for d == 1.
struct Blobs {
    std::size_t n = 300;
    int n_classes = 3;
    std::size_t d = 2;
    double separation = 3.0;
};

/// Stationary AR(1) series with an additive level shift from shift_index
/// onward. Features are the time index; targets the series.
struct Ar1Changepoint {
    std::size_t n = 1000;
    double phi = 0.5;
    double noise_sigma = 1.0;
    double shift_magnitude = 10.0;
    std::size_t shift_index = 500;
};

struct GeneratorSpec {
    std::variant<LinearGaussian, Heteroscedastic, Blobs, Ar1Changepoint> kind;
    std::uint64_t seed = 0;
};

Dataset generate(const GeneratorSpec& spec);

/// Row t holds (y[t-1], ..., y[t-n_lags]) with target y[t], for t from
/// n_lags to the end; chronological order is kept.
Dataset build_lag_features(std::span<const double> series, std::size_t n_lags);

}  // namespace conformal
