#pragma once

// Shared by the bootstrap regression engine and the time-series engine.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "conformal/rng.hpp"

namespace conformal::detail {

struct OutOfBag {
    std::vector<std::vector<std::size_t>> resamples;  // rows per model, with multiplicity
    std::vector<std::vector<std::size_t>> held_out;   // per model, ascending
    std::vector<std::vector<std::size_t>> predictors; // per training index
    std::vector<std::size_t> fallback;                 // indices in every resample
};

using ResampleFn = std::function<std::vector<std::size_t>(Rng&)>;

/// Draws `k` resamples with Rng::stream(seed, attempt), redrawing with the
/// next attempt (up to kMaxRedraws times) while some index is in every
/// resample. Indices still covered after that are predicted by all models.
inline constexpr int kMaxRedraws = 10;

OutOfBag draw_out_of_bag(std::size_t n, std::size_t k, std::uint64_t seed,
                         const ResampleFn& resample);

}  // namespace conformal::detail
