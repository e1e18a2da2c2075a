#include "resampling.hpp"

#include <algorithm>
#include <numeric>

namespace conformal::detail {

OutOfBag draw_out_of_bag(std::size_t n, std::size_t k, std::uint64_t seed,
                         const ResampleFn& resample) {
    OutOfBag out;
    for (int attempt = 0; attempt <= kMaxRedraws; ++attempt) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(attempt));
        out.resamples.assign(k, {});
        for (auto& rows : out.resamples) rows = resample(rng);

        out.held_out.assign(k, {});
        out.predictors.assign(n, {});
        std::vector<char> in_bag(n);
        for (std::size_t m = 0; m < k; ++m) {
            std::fill(in_bag.begin(), in_bag.end(), 0);
            for (std::size_t r : out.resamples[m]) in_bag[r] = 1;
            for (std::size_t i = 0; i < n; ++i) {
                if (!in_bag[i]) {
                    out.held_out[m].push_back(i);
                    out.predictors[i].push_back(m);
                }
            }
        }

        out.fallback.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (out.predictors[i].empty()) out.fallback.push_back(i);
        }
        if (out.fallback.empty()) break;
    }

    for (std::size_t i : out.fallback) {
        out.predictors[i].resize(k);
        std::iota(out.predictors[i].begin(), out.predictors[i].end(), 0);
    }
    return out;
}

}  // namespace conformal::detail
