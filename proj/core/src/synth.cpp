#include "conformal/synth.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "conformal/rng.hpp"

namespace conformal {
namespace {

// Independent streams per concern, so e.g. changing noise_sigma does not
// move the features.
enum Stream : std::uint64_t { kParams = 0, kFeatures = 1, kNoise = 2, kLabels = 3 };

std::vector<std::string> numbered_names(const char* prefix, std::size_t d) {
    std::vector<std::string> names(d);
    for (std::size_t j = 0; j < d; ++j) names[j] = prefix + std::to_string(j);
    return names;
}

Dataset make(const LinearGaussian& g, std::uint64_t seed) {
    if (g.n < 1 || g.d < 1) throw std::invalid_argument("linear_gaussian needs n >= 1 and d >= 1");
    if (!(g.noise_sigma >= 0)) throw std::invalid_argument("noise_sigma must be non-negative");
    Rng params = Rng::stream(seed, kParams);
    const double intercept = params.normal();
    std::vector<double> w(g.d);
    for (double& v : w) v = params.normal();

    Rng features = Rng::stream(seed, kFeatures);
    Rng noise = Rng::stream(seed, kNoise);
    Matrix x(g.n, g.d);
    std::vector<double> y(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        double target = intercept;
        for (std::size_t j = 0; j < g.d; ++j) {
            x(i, j) = features.normal();
            target += w[j] * x(i, j);
        }
        y[i] = target + g.noise_sigma * noise.normal();
    }
    return Dataset::regression(std::move(x), std::move(y), numbered_names("x", g.d));
}

Dataset make(const Heteroscedastic& g, std::uint64_t seed) {
    if (g.n < 1) throw std::invalid_argument("heteroscedastic needs n >= 1");
    Rng features = Rng::stream(seed, kFeatures);
    Rng noise = Rng::stream(seed, kNoise);
    Matrix x(g.n, 1);
    std::vector<double> y(g.n);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double xi = features.uniform(0.0, 5.0);
        x(i, 0) = xi;
        y[i] = 2.0 * xi + 1.0 + (0.1 + 0.5 * xi) * noise.normal();
    }
    return Dataset::regression(std::move(x), std::move(y), {"x0"});
}

Dataset make(const Blobs& g, std::uint64_t seed) {
    if (g.n < 1 || g.d < 1 || g.n_classes < 1) {
        throw std::invalid_argument("blobs needs n, d and n_classes >= 1");
    }
    std::vector<int> labels(g.n);
    for (std::size_t i = 0; i < g.n; ++i) labels[i] = static_cast<int>(i % static_cast<std::size_t>(g.n_classes));
    Rng label_rng = Rng::stream(seed, kLabels);
    shuffle(labels, label_rng);

    Rng features = Rng::stream(seed, kFeatures);
    Matrix x(g.n, g.d);
    for (std::size_t i = 0; i < g.n; ++i) {
        const int c = labels[i];
        for (std::size_t j = 0; j < g.d; ++j) x(i, j) = features.normal();
        if (g.d == 1) {
            x(i, 0) += g.separation * c;
        } else {
            const double angle = 2.0 * std::numbers::pi * c / g.n_classes;
            x(i, 0) += g.separation * std::cos(angle);
            x(i, 1) += g.separation * std::sin(angle);
        }
    }
    return Dataset::classification(std::move(x), std::move(labels), g.n_classes,
                                   numbered_names("x", g.d));
}

Dataset make(const Ar1Changepoint& g, std::uint64_t seed) {
    if (g.n < 1) throw std::invalid_argument("ar1_changepoint needs n >= 1");
    if (g.shift_index >= g.n) throw std::invalid_argument("shift_index must be < n");
    if (!(std::abs(g.phi) < 1)) throw std::invalid_argument("|phi| must be < 1 for stationarity");
    if (!(g.noise_sigma >= 0)) throw std::invalid_argument("noise_sigma must be non-negative");

    Rng noise = Rng::stream(seed, kNoise);
    Matrix t(g.n, 1);
    std::vector<double> y(g.n);
    double level = g.noise_sigma / std::sqrt(1.0 - g.phi * g.phi) * noise.normal();
    for (std::size_t i = 0; i < g.n; ++i) {
        if (i > 0) level = g.phi * level + g.noise_sigma * noise.normal();
        t(i, 0) = static_cast<double>(i);
        y[i] = level + (i >= g.shift_index ? g.shift_magnitude : 0.0);
    }
    return Dataset::regression(std::move(t), std::move(y), {"t"});
}

}  // namespace

Dataset generate(const GeneratorSpec& spec) {
    return std::visit([&](const auto& g) { return make(g, spec.seed); }, spec.kind);
}

Dataset build_lag_features(std::span<const double> series, std::size_t n_lags) {
    if (n_lags < 1) throw std::invalid_argument("n_lags must be >= 1");
    if (series.size() <= n_lags) {
        throw std::invalid_argument("series of length " + std::to_string(series.size()) +
                                    " is too short for " + std::to_string(n_lags) + " lags");
    }
    const std::size_t rows = series.size() - n_lags;
    Matrix x(rows, n_lags);
    std::vector<double> y(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t t = r + n_lags;
        for (std::size_t lag = 1; lag <= n_lags; ++lag) x(r, lag - 1) = series[t - lag];
        y[r] = series[t];
    }
    std::vector<std::string> names(n_lags);
    for (std::size_t lag = 1; lag <= n_lags; ++lag) names[lag - 1] = "lag" + std::to_string(lag);
    return Dataset::regression(std::move(x), std::move(y), std::move(names));
}

}  // namespace conformal
