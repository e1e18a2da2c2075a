#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "conformal/learners.hpp"
#include "conformal/regression.hpp"
#include "conformal/rng.hpp"
#include "conformal/types.hpp"

namespace conformal {

struct EnbpiConfig {
    std::size_t n_bootstraps = 30;
    std::size_t block_length = 1;
    Aggregation aggregation = Aggregation::mean;
    std::size_t beta_grid_size = 100;
    std::uint64_t seed = 0;
};

/// Moving-block bootstrap: ceil(n / block_length) blocks with uniform starts
/// in [0, n - block_length], concatenated and truncated to n rows.
std::vector<std::size_t> moving_block_resample(std::size_t n, std::size_t block_length, Rng& rng);

/// Width of [q_beta, q_{1 - alpha + beta}] over ascending-sorted signed
/// scores, with clamped empirical quantiles.
double asymmetric_width(std::span<const double> sorted, RiskLevel alpha, double beta);

/// Grid point beta in {0, alpha/(g-1), ..., alpha} minimising
/// asymmetric_width; the smallest such beta wins ties.
double optimize_beta(const ConformityScores& scores, RiskLevel alpha, std::size_t grid_size);
double optimize_beta_sorted(std::span<const double> sorted, RiskLevel alpha,
                            std::size_t grid_size);

/// Ensemble batch prediction intervals for ordered data.
///
/// Holds K block-bootstrap sub-models and a FIFO window of signed residuals
/// y - y_hat with capacity equal to the training length. Intervals are
/// [y_hat + q_beta, y_hat + q_{1 - alpha + beta}], where y_hat aggregates all
/// K sub-models and beta minimises the width. The window may be refreshed
/// with observed outcomes via update_scores(); sub-models are never refitted.
///
/// Not thread-safe for mixed predict/update; callers serialise the cycle.
class FittedEnbpi {
public:
    double aggregate_prediction(std::span<const double> x) const;
    PredictionInterval predict(std::span<const double> x, RiskLevel alpha) const;
    std::vector<PredictionInterval> predict_batch(const Matrix& features, RiskLevel alpha) const;

    /// Appends y - aggregate_prediction(x) for every row, evicting the
    /// oldest scores so the window never exceeds capacity().
    void update_scores(const Matrix& new_x, std::span<const double> new_y);

    ConformityScores scores() const;
    const std::deque<double>& score_window() const noexcept { return window_; }
    std::size_t capacity() const noexcept { return capacity_; }
    const EnbpiConfig& config() const noexcept { return config_; }
    const std::vector<SubModel>& sub_models() const noexcept { return sub_models_; }
    const std::vector<std::vector<std::size_t>>& out_of_bag() const noexcept { return predictors_; }
    const std::vector<std::size_t>& fallback_indices() const noexcept { return fallback_; }

private:
    friend FittedEnbpi fit_enbpi(const Regressor&, const Dataset&, const EnbpiConfig&,
                                 std::size_t);
    FittedEnbpi() = default;

    PredictionInterval interval_from_sorted(double center, std::span<const double> sorted,
                                            RiskLevel alpha) const;

    EnbpiConfig config_;
    std::vector<SubModel> sub_models_;
    std::vector<std::vector<std::size_t>> predictors_;
    std::vector<std::size_t> fallback_;
    std::deque<double> window_;
    std::size_t capacity_ = 0;
};

/// Rows of `train` must be in chronological order. Resample k of draw
/// attempt a comes from Rng::stream(seed, a), consumed in model order.
FittedEnbpi fit_enbpi(const Regressor& model_template, const Dataset& train,
                      const EnbpiConfig& config, std::size_t threads = 0);

}  // namespace conformal
