#include "conformal/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace conformal {
namespace {

constexpr double kRankSlack = 1e-12;

std::size_t ceil_rank(double x) {
    if (x <= 0.0) return 0;
    return static_cast<std::size_t>(std::ceil(x - kRankSlack * x));
}

// k-th smallest (1-based) without sorting the whole input.
double select_kth(std::span<const double> values, std::size_t k) {
    std::vector<double> copy(values.begin(), values.end());
    auto it = copy.begin() + static_cast<std::ptrdiff_t>(k - 1);
    std::nth_element(copy.begin(), it, copy.end());
    return *it;
}

}  // namespace

std::size_t conformal_rank(std::size_t n, RiskLevel alpha) {
    return std::max<std::size_t>(1, ceil_rank(static_cast<double>(n + 1) * alpha.coverage()));
}

double upper_quantile_plus(std::span<const double> values, RiskLevel alpha) {
    if (values.empty()) throw std::invalid_argument("empty calibration set");
    const std::size_t k = conformal_rank(values.size(), alpha);
    if (k > values.size()) return std::numeric_limits<double>::infinity();
    return select_kth(values, k);
}

double lower_quantile_minus(std::span<const double> values, RiskLevel alpha) {
    if (values.empty()) throw std::invalid_argument("empty calibration set");
    const std::size_t n = values.size();
    const std::size_t k = conformal_rank(n, alpha);
    if (k > n) return -std::numeric_limits<double>::infinity();
    // k-th largest of v is the k-th smallest of -v, negated.
    return select_kth(values, n + 1 - k);
}

double conformal_quantile(const ConformityScores& scores, RiskLevel alpha) {
    return upper_quantile_plus(scores.values(), alpha);
}

double clamped_quantile_sorted(std::span<const double> sorted, double level) {
    if (sorted.empty()) throw std::invalid_argument("empty calibration set");
    const std::size_t n = sorted.size();
    std::size_t k = ceil_rank(level * static_cast<double>(n + 1));
    k = std::clamp<std::size_t>(k, 1, n);
    return sorted[k - 1];
}

}  // namespace conformal
