#include "conformal/timeseries.hpp"

#include <algorithm>
#include <stdexcept>

#include "conformal/parallel.hpp"
#include "conformal/quantile.hpp"
#include "resampling.hpp"

namespace conformal {

std::vector<std::size_t> moving_block_resample(std::size_t n, std::size_t block_length,
                                               Rng& rng) {
    if (block_length == 0 || block_length > n) {
        throw std::invalid_argument("block length must lie in [1, n]");
    }
    const std::size_t blocks = (n + block_length - 1) / block_length;
    const std::size_t starts = n - block_length + 1;
    std::vector<std::size_t> rows;
    rows.reserve(blocks * block_length);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t start = rng.index(starts);
        for (std::size_t t = 0; t < block_length; ++t) rows.push_back(start + t);
    }
    rows.resize(n);
    return rows;
}

double asymmetric_width(std::span<const double> sorted, RiskLevel alpha, double beta) {
    const double lo = clamped_quantile_sorted(sorted, beta);
    const double hi = clamped_quantile_sorted(sorted, 1.0 - alpha.value() + beta);
    return hi - lo;
}

double optimize_beta_sorted(std::span<const double> sorted, RiskLevel alpha,
                            std::size_t grid_size) {
    if (sorted.empty()) throw std::invalid_argument("empty calibration set");
    if (grid_size < 2) throw std::invalid_argument("beta grid needs at least 2 points");
    double best_beta = 0.0;
    double best_width = asymmetric_width(sorted, alpha, 0.0);
    for (std::size_t j = 1; j < grid_size; ++j) {
        const double beta =
            alpha.value() * static_cast<double>(j) / static_cast<double>(grid_size - 1);
        const double width = asymmetric_width(sorted, alpha, beta);
        if (width < best_width) {
            best_width = width;
            best_beta = beta;
        }
    }
    return best_beta;
}

double optimize_beta(const ConformityScores& scores, RiskLevel alpha, std::size_t grid_size) {
    std::vector<double> sorted(scores.values().begin(), scores.values().end());
    std::sort(sorted.begin(), sorted.end());
    return optimize_beta_sorted(sorted, alpha, grid_size);
}

FittedEnbpi fit_enbpi(const Regressor& model_template, const Dataset& train,
                      const EnbpiConfig& config, std::size_t threads) {
    const std::size_t n = train.size();
    if (config.n_bootstraps < 2) throw std::invalid_argument("EnbPI needs at least 2 bootstraps");
    if (config.block_length == 0) throw std::invalid_argument("block length must be >= 1");
    if (config.block_length > n) {
        throw std::invalid_argument("block length " + std::to_string(config.block_length) +
                                    " exceeds series length " + std::to_string(n));
    }
    if (config.beta_grid_size < 2) throw std::invalid_argument("beta grid needs at least 2 points");

    const std::size_t block = config.block_length;
    auto oob = detail::draw_out_of_bag(
        n, config.n_bootstraps, config.seed,
        [n, block](Rng& rng) { return moving_block_resample(n, block, rng); });

    FittedEnbpi state;
    state.config_ = config;
    state.sub_models_.resize(config.n_bootstraps);
    for (std::size_t k = 0; k < config.n_bootstraps; ++k) {
        state.sub_models_[k].training_rows = std::move(oob.resamples[k]);
        state.sub_models_[k].held_out = std::move(oob.held_out[k]);
    }
    state.predictors_ = std::move(oob.predictors);
    state.fallback_ = std::move(oob.fallback);

    parallel_for(
        state.sub_models_.size(),
        [&](std::size_t k) {
            auto model = model_template.clone();
            model->fit(train.subset(state.sub_models_[k].training_rows));
            state.sub_models_[k].model = std::move(model);
        },
        threads);

    std::vector<double> buffer;
    for (std::size_t i = 0; i < n; ++i) {
        buffer.clear();
        for (std::size_t k : state.predictors_[i]) {
            buffer.push_back(state.sub_models_[k].model->predict(train.row(i)));
        }
        state.window_.push_back(train.target(i) - aggregate(buffer, config.aggregation));
    }
    state.capacity_ = n;
    return state;
}

double FittedEnbpi::aggregate_prediction(std::span<const double> x) const {
    std::vector<double> preds(sub_models_.size());
    for (std::size_t k = 0; k < sub_models_.size(); ++k) preds[k] = sub_models_[k].model->predict(x);
    return aggregate(preds, config_.aggregation);
}

PredictionInterval FittedEnbpi::interval_from_sorted(double center, std::span<const double> sorted,
                                                     RiskLevel alpha) const {
    const double beta = optimize_beta_sorted(sorted, alpha, config_.beta_grid_size);
    const double lo = clamped_quantile_sorted(sorted, beta);
    const double hi = clamped_quantile_sorted(sorted, 1.0 - alpha.value() + beta);
    return {center, center + lo, center + hi};
}

PredictionInterval FittedEnbpi::predict(std::span<const double> x, RiskLevel alpha) const {
    std::vector<double> sorted(window_.begin(), window_.end());
    std::sort(sorted.begin(), sorted.end());
    return interval_from_sorted(aggregate_prediction(x), sorted, alpha);
}

std::vector<PredictionInterval> FittedEnbpi::predict_batch(const Matrix& features,
                                                           RiskLevel alpha) const {
    std::vector<double> sorted(window_.begin(), window_.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<PredictionInterval> out;
    out.reserve(features.rows());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        out.push_back(interval_from_sorted(aggregate_prediction(features.row(r)), sorted, alpha));
    }
    return out;
}

void FittedEnbpi::update_scores(const Matrix& new_x, std::span<const double> new_y) {
    if (new_x.rows() != new_y.size()) {
        throw std::invalid_argument("update rows (" + std::to_string(new_x.rows()) +
                                    ") and observations (" + std::to_string(new_y.size()) +
                                    ") differ in length");
    }
    for (std::size_t r = 0; r < new_y.size(); ++r) {
        window_.push_back(new_y[r] - aggregate_prediction(new_x.row(r)));
        while (window_.size() > capacity_) window_.pop_front();
    }
}

ConformityScores FittedEnbpi::scores() const {
    return ConformityScores(std::vector<double>(window_.begin(), window_.end()),
                            ScoreKind::signed_residual);
}

}  // namespace conformal
