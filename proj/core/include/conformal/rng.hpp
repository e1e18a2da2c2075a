#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace conformal {

/// SplitMix64 finaliser. Used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seeded generator with portable output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard.
/// The distributions are implemented here rather than taken from <random>,
/// whose algorithms are implementation-defined, so results are identical
/// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent child stream; the same (seed, stream) pair always yields
    /// the same sequence regardless of what other streams were drawn.
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::size_t index(std::size_t bound);

    /// Standard normal via the Marsaglia polar method.
    double normal();
    double normal(double mean, double sigma) { return mean + sigma * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Fisher-Yates shuffle driven by Rng::index.
template <class T>
void shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::swap(values[i - 1], values[rng.index(i)]);
    }
}

}  // namespace conformal
