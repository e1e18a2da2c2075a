#include "conformal/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "conformal/parallel.hpp"
#include "conformal/quantile.hpp"
#include "conformal/rng.hpp"
#include "resampling.hpp"

namespace conformal {

ResamplingScheme ResamplingScheme::prefit() { return {}; }

ResamplingScheme ResamplingScheme::leave_one_out() {
    ResamplingScheme s;
    s.kind = Kind::leave_one_out;
    return s;
}

ResamplingScheme ResamplingScheme::kfold(std::size_t k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("K-fold needs K >= 2");
    ResamplingScheme s;
    s.kind = Kind::kfold;
    s.n_splits = k;
    s.seed = seed;
    return s;
}

ResamplingScheme ResamplingScheme::bootstrap(std::size_t k, Aggregation agg, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("bootstrap needs K >= 2 resamples");
    ResamplingScheme s;
    s.kind = Kind::bootstrap;
    s.n_splits = k;
    s.aggregation = agg;
    s.seed = seed;
    return s;
}

const char* to_string(IntervalMethod method) {
    switch (method) {
        case IntervalMethod::base: return "base";
        case IntervalMethod::plus: return "plus";
        case IntervalMethod::minmax: return "minmax";
    }
    return "unknown";
}

const char* to_string(ResamplingScheme::Kind kind) {
    switch (kind) {
        case ResamplingScheme::Kind::prefit: return "prefit";
        case ResamplingScheme::Kind::leave_one_out: return "loo";
        case ResamplingScheme::Kind::kfold: return "kfold";
        case ResamplingScheme::Kind::bootstrap: return "bootstrap";
    }
    return "unknown";
}

std::vector<std::vector<std::size_t>> kfold_partition(std::size_t n, std::size_t k,
                                                      std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("K-fold needs K >= 2");
    if (k > n) {
        throw std::invalid_argument("K=" + std::to_string(k) + " folds exceed n=" +
                                    std::to_string(n) + " points");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    shuffle(order, rng);

    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(order[i]);
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    std::sort(folds.begin(), folds.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return folds;
}

namespace {

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& sorted_held) {
    std::vector<std::size_t> rows;
    rows.reserve(n - sorted_held.size());
    std::size_t h = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (h < sorted_held.size() && sorted_held[h] == i) {
            ++h;
        } else {
            rows.push_back(i);
        }
    }
    return rows;
}

}  // namespace

FittedConformalRegressor fit_split(RegressorPtr model, const Dataset& calibration) {
    if (!model) throw std::invalid_argument("split conformal needs a model");
    if (!model->is_fitted()) throw std::logic_error("split conformal needs a prefit model");
    if (calibration.empty()) throw std::invalid_argument("empty calibration set");

    std::vector<double> residuals(calibration.size());
    for (std::size_t i = 0; i < calibration.size(); ++i) {
        residuals[i] = std::abs(calibration.target(i) - model->predict(calibration.row(i)));
    }
    FittedConformalRegressor state(ConformityScores(std::move(residuals),
                                                    ScoreKind::absolute_residual),
                                   ResamplingScheme::prefit(), IntervalMethod::base);
    state.full_model_ = std::move(model);
    return state;
}

FittedConformalRegressor fit_cross(const Regressor& model_template, const Dataset& train,
                                   ResamplingScheme scheme, IntervalMethod method,
                                   std::size_t threads) {
    using Kind = ResamplingScheme::Kind;
    const std::size_t n = train.size();
    if (scheme.kind == Kind::prefit) {
        throw std::invalid_argument("fit_cross needs a resampling scheme; use fit_split for prefit");
    }
    if (n < 3) throw std::invalid_argument("cross-conformal fitting needs at least 3 points");

    std::vector<SubModel> subs;
    std::vector<std::vector<std::size_t>> predictors(n);
    std::vector<std::size_t> fallback;

    if (scheme.kind == Kind::bootstrap) {
        auto draw = [n](Rng& rng) {
            std::vector<std::size_t> rows(n);
            for (auto& r : rows) r = rng.index(n);
            return rows;
        };
        auto oob = detail::draw_out_of_bag(n, scheme.n_splits, scheme.seed, draw);
        subs.resize(scheme.n_splits);
        for (std::size_t k = 0; k < subs.size(); ++k) {
            subs[k].training_rows = std::move(oob.resamples[k]);
            subs[k].held_out = std::move(oob.held_out[k]);
        }
        predictors = std::move(oob.predictors);
        fallback = std::move(oob.fallback);
    } else {
        const std::size_t k =
            scheme.kind == Kind::leave_one_out ? n : scheme.n_splits;
        std::vector<std::vector<std::size_t>> folds;
        if (scheme.kind == Kind::leave_one_out) {
            folds.resize(n);
            for (std::size_t i = 0; i < n; ++i) folds[i] = {i};
        } else {
            folds = kfold_partition(n, k, scheme.seed);
        }
        subs.resize(folds.size());
        for (std::size_t f = 0; f < folds.size(); ++f) {
            subs[f].training_rows = complement(n, folds[f]);
            for (std::size_t i : folds[f]) predictors[i] = {f};
            subs[f].held_out = std::move(folds[f]);
        }
    }

    const bool with_full = method == IntervalMethod::base;
    const std::size_t n_models = subs.size();
    std::vector<RegressorPtr> fitted(n_models + (with_full ? 1 : 0));
    parallel_for(
        fitted.size(),
        [&](std::size_t t) {
            auto model = model_template.clone();
            if (t < n_models) {
                model->fit(train.subset(subs[t].training_rows));
            } else {
                model->fit(train);
            }
            fitted[t] = std::move(model);
        },
        threads);
    for (std::size_t k = 0; k < n_models; ++k) subs[k].model = fitted[k];

    std::vector<double> residuals(n);
    std::vector<double> buffer;
    for (std::size_t i = 0; i < n; ++i) {
        buffer.clear();
        for (std::size_t k : predictors[i]) buffer.push_back(subs[k].model->predict(train.row(i)));
        const double prediction =
            buffer.size() == 1 ? buffer.front() : aggregate(buffer, scheme.aggregation);
        residuals[i] = std::abs(train.target(i) - prediction);
    }

    FittedConformalRegressor state(ConformityScores(std::move(residuals),
                                                    ScoreKind::absolute_residual),
                                   scheme, method);
    if (with_full) state.full_model_ = fitted.back();
    state.sub_models_ = std::move(subs);
    state.predictors_ = std::move(predictors);
    state.fallback_ = std::move(fallback);
    return state;
}

std::vector<double> FittedConformalRegressor::held_out_predictions(
    std::span<const double> x) const {
    std::vector<double> per_model(sub_models_.size());
    for (std::size_t k = 0; k < sub_models_.size(); ++k) {
        per_model[k] = sub_models_[k].model->predict(x);
    }
    std::vector<double> out(predictors_.size());
    std::vector<double> buffer;
    for (std::size_t i = 0; i < predictors_.size(); ++i) {
        const auto& ids = predictors_[i];
        if (ids.size() == 1) {
            out[i] = per_model[ids.front()];
            continue;
        }
        buffer.clear();
        for (std::size_t k : ids) buffer.push_back(per_model[k]);
        out[i] = aggregate(buffer, scheme_.aggregation);
    }
    return out;
}

double FittedConformalRegressor::point_prediction(std::span<const double> sub_predictions,
                                                  std::span<const double> x) const {
    if (full_model_) return full_model_->predict(x);
    return aggregate(sub_predictions, Aggregation::mean);
}

PredictionInterval FittedConformalRegressor::predict_interval(std::span<const double> x,
                                                              RiskLevel alpha) const {
    if (method_ == IntervalMethod::base) {
        if (!full_model_) throw std::logic_error("base intervals need a full model");
        const double center = full_model_->predict(x);
        const double q = conformal_quantile(scores_, alpha);
        return {center, center - q, center + q};
    }

    std::vector<double> per_model(sub_models_.size());
    for (std::size_t k = 0; k < sub_models_.size(); ++k) {
        per_model[k] = sub_models_[k].model->predict(x);
    }
    const double point = point_prediction(per_model, x);
    const auto m = held_out_predictions(x);
    const auto residuals = scores_.values();

    if (method_ == IntervalMethod::plus) {
        std::vector<double> lows(m.size());
        std::vector<double> highs(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            lows[i] = m[i] - residuals[i];
            highs[i] = m[i] + residuals[i];
        }
        const double lower = lower_quantile_minus(lows, alpha);
        const double upper = upper_quantile_plus(highs, alpha);
        // For large alpha the two quantiles can cross (an empty interval);
        // report it as a single point between them.
        if (lower > upper) {
            const double mid = 0.5 * (lower + upper);
            return {point, mid, mid};
        }
        return {point, lower, upper};
    }

    const auto [lo, hi] = std::minmax_element(m.begin(), m.end());
    const double q = conformal_quantile(scores_, alpha);
    return {point, *lo - q, *hi + q};
}

std::vector<PredictionInterval> FittedConformalRegressor::predict_batch(
    const Matrix& features, RiskLevel alpha, std::size_t threads) const {
    std::vector<PredictionInterval> out(features.rows());
    parallel_for(
        features.rows(),
        [&](std::size_t r) { out[r] = predict_interval(features.row(r), alpha); }, threads);
    return out;
}

}  // namespace conformal
