#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "conformal/types.hpp"

namespace conformal {

struct RegressionReport {
    double coverage = 0.0;
    /// +inf whenever any interval is unbounded; see n_infinite.
    double mean_width = 0.0;
    std::size_t n_infinite = 0;
    std::size_t n = 0;
};

struct ClassificationReport {
    double coverage = 0.0;
    double mean_set_size = 0.0;
    double empty_fraction = 0.0;
    std::size_t n = 0;
};

/// Intervals are closed: y on a bound counts as covered.
RegressionReport regression_report(std::span<const double> y_true,
                                   std::span<const PredictionInterval> intervals);

ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const PredictionSet> sets);

/// Coverage over each length-`window` slice; n - window + 1 values.
std::vector<double> rolling_coverage(std::span<const double> y_true,
                                     std::span<const PredictionInterval> intervals,
                                     std::size_t window);

}  // namespace conformal
