#pragma once

#include <cstddef>
#include <span>

#include "conformal/types.hpp"

namespace conformal {

/// 1-based order statistic k = ceil((n + 1)(1 - alpha)). May exceed n, in
/// which case no finite calibrated bound exists.
///
/// The product is computed in floating point; a relative slack of 1e-12 is
/// removed before the ceiling so that products which are integers in exact
/// arithmetic (e.g. 10 * 0.9) do not round up to the next rank.
std::size_t conformal_rank(std::size_t n, RiskLevel alpha);

/// k-th smallest score with k = conformal_rank(n, alpha), or +inf when k > n.
/// Throws std::invalid_argument("empty calibration set") for no scores.
double conformal_quantile(const ConformityScores& scores, RiskLevel alpha);

/// Same order statistic over an arbitrary value list (the q+ of jackknife+).
double upper_quantile_plus(std::span<const double> values, RiskLevel alpha);

/// -upper_quantile_plus(-values, alpha); -inf when the rank is out of range.
double lower_quantile_minus(std::span<const double> values, RiskLevel alpha);

/// Empirical quantile of ascending-sorted values at `level`, using index
/// ceil(level * (n + 1)) clamped to [1, n]. Never infinite.
double clamped_quantile_sorted(std::span<const double> sorted, double level);

}  // namespace conformal
