#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "conformal/learners.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// How calibration residuals are produced.
///
///  - prefit: the model is already trained; residuals come from a separate
///    calibration set (split conformal).
///  - leave_one_out: n models, each trained without one point (jackknife).
///  - kfold: K models, each trained without one fold (CV). Indices are
///    shuffled with `seed` and dealt round-robin, so fold sizes differ by at
///    most one.
///  - bootstrap: K models on size-n resamples drawn with replacement; a
///    point's prediction is the aggregate over models whose resample
///    excludes it (jackknife+-after-bootstrap).
struct ResamplingScheme {
    enum class Kind { prefit, leave_one_out, kfold, bootstrap };

    Kind kind = Kind::prefit;
    std::size_t n_splits = 0;
    Aggregation aggregation = Aggregation::mean;
    std::uint64_t seed = 0;

    static ResamplingScheme prefit();
    static ResamplingScheme leave_one_out();
    static ResamplingScheme kfold(std::size_t k, std::uint64_t seed = 0);
    static ResamplingScheme bootstrap(std::size_t k, Aggregation agg = Aggregation::mean,
                                      std::uint64_t seed = 0);
};

/// base: full model +- q. plus: quantiles of m_i(x) -+ R_i; when alpha is
/// large enough for them to cross, the interval is the point midway between.
/// minmax: [min m_i(x) - q, max m_i(x) + q].
enum class IntervalMethod { base, plus, minmax };

const char* to_string(IntervalMethod method);
const char* to_string(ResamplingScheme::Kind kind);

/// One fitted resampling model.
struct SubModel {
    RegressorPtr model;
    /// Rows the model was trained on, with multiplicity for bootstrap.
    std::vector<std::size_t> training_rows;
    /// Training indices this model did not see, ascending.
    std::vector<std::size_t> held_out;
};

/// Calibrated regression state; immutable and safe to share across threads.
class FittedConformalRegressor {
public:
    PredictionInterval predict_interval(std::span<const double> x, RiskLevel alpha) const;
    std::vector<PredictionInterval> predict_batch(const Matrix& features, RiskLevel alpha,
                                                  std::size_t threads = 1) const;

    const ConformityScores& scores() const noexcept { return scores_; }
    const ResamplingScheme& scheme() const noexcept { return scheme_; }
    IntervalMethod method() const noexcept { return method_; }
    const RegressorPtr& full_model() const noexcept { return full_model_; }
    const std::vector<SubModel>& sub_models() const noexcept { return sub_models_; }

    /// Sub-model ids whose predictions are aggregated for training index i.
    const std::vector<std::size_t>& predictors_of(std::size_t i) const { return predictors_[i]; }

    /// Training indices that were in every bootstrap resample and therefore
    /// use the aggregate of all sub-models.
    const std::vector<std::size_t>& fallback_indices() const noexcept { return fallback_; }

    /// Per-training-index predictions m_i(x): the held-out model for
    /// LOO/K-fold, the out-of-bag aggregate for bootstrap.
    std::vector<double> held_out_predictions(std::span<const double> x) const;

private:
    friend FittedConformalRegressor fit_split(RegressorPtr, const Dataset&);
    friend FittedConformalRegressor fit_cross(const Regressor&, const Dataset&, ResamplingScheme,
                                              IntervalMethod, std::size_t);

    FittedConformalRegressor(ConformityScores scores, ResamplingScheme scheme,
                             IntervalMethod method)
        : scores_(std::move(scores)), scheme_(scheme), method_(method) {}

    double point_prediction(std::span<const double> sub_predictions,
                            std::span<const double> x) const;

    ConformityScores scores_;
    ResamplingScheme scheme_;
    IntervalMethod method_;
    RegressorPtr full_model_;
    std::vector<SubModel> sub_models_;
    std::vector<std::vector<std::size_t>> predictors_;
    std::vector<std::size_t> fallback_;
};

/// Split conformal: `model` is already fitted, residuals |y - f(x)| come
/// from `calibration`. The result always uses IntervalMethod::base.
FittedConformalRegressor fit_split(RegressorPtr model, const Dataset& calibration);

/// Cross-conformal family. `model_template` is cloned once per fold or
/// resample (and once more for the full model when method == base).
/// `threads` = 0 uses default_thread_count(); results are merged in fold
/// order so output never depends on scheduling.
FittedConformalRegressor fit_cross(const Regressor& model_template, const Dataset& train,
                                   ResamplingScheme scheme, IntervalMethod method,
                                   std::size_t threads = 0);

/// Fold assignment used by the kfold scheme: each fold sorted ascending,
/// folds ordered by their smallest index. With k == n this is exactly the
/// leave-one-out partition.
std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k,
                                                      std::uint64_t seed);

}  // namespace conformal
