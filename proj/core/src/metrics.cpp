#include "conformal/metrics.hpp"

#include <limits>
#include <stdexcept>
#include <string>

namespace conformal {
namespace {

void require_same_length(std::size_t a, std::size_t b) {
    if (a != b) {
        throw std::invalid_argument("length mismatch: " + std::to_string(a) + " targets vs " +
                                    std::to_string(b) + " predictions");
    }
}

}  // namespace

RegressionReport regression_report(std::span<const double> y_true,
                                   std::span<const PredictionInterval> intervals) {
    require_same_length(y_true.size(), intervals.size());
    if (y_true.empty()) throw std::invalid_argument("regression report needs at least one point");

    RegressionReport report;
    report.n = y_true.size();
    std::size_t covered = 0;
    double width_sum = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (intervals[i].contains(y_true[i])) ++covered;
        if (intervals[i].bounded()) {
            width_sum += intervals[i].width();
        } else {
            ++report.n_infinite;
        }
    }
    report.coverage = static_cast<double>(covered) / static_cast<double>(report.n);
    report.mean_width = report.n_infinite > 0 ? std::numeric_limits<double>::infinity()
                                              : width_sum / static_cast<double>(report.n);
    return report;
}

ClassificationReport classification_report(std::span<const int> y_true,
                                           std::span<const PredictionSet> sets) {
    require_same_length(y_true.size(), sets.size());
    if (y_true.empty()) throw std::invalid_argument("classification report needs at least one point");

    ClassificationReport report;
    report.n = y_true.size();
    std::size_t covered = 0;
    std::size_t empty = 0;
    std::size_t size_sum = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (sets[i].contains(y_true[i])) ++covered;
        const std::size_t size = sets[i].size();
        if (size == 0) ++empty;
        size_sum += size;
    }
    const auto n = static_cast<double>(report.n);
    report.coverage = static_cast<double>(covered) / n;
    report.mean_set_size = static_cast<double>(size_sum) / n;
    report.empty_fraction = static_cast<double>(empty) / n;
    return report;
}

std::vector<double> rolling_coverage(std::span<const double> y_true,
                                     std::span<const PredictionInterval> intervals,
                                     std::size_t window) {
    require_same_length(y_true.size(), intervals.size());
    const std::size_t n = y_true.size();
    if (window < 1 || window > n) {
        throw std::invalid_argument("rolling window " + std::to_string(window) +
                                    " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<int> hit(n);
    for (std::size_t i = 0; i < n; ++i) hit[i] = intervals[i].contains(y_true[i]) ? 1 : 0;

    std::vector<double> out;
    out.reserve(n - window + 1);
    long count = 0;
    for (std::size_t i = 0; i < window; ++i) count += hit[i];
    out.push_back(static_cast<double>(count) / static_cast<double>(window));
    for (std::size_t i = window; i < n; ++i) {
        count += hit[i] - hit[i - window];
        out.push_back(static_cast<double>(count) / static_cast<double>(window));
    }
    return out;
}

}  // namespace conformal
