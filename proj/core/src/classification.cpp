#include "conformal/classification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "conformal/parallel.hpp"
#include "conformal/quantile.hpp"
#include "conformal/rng.hpp"

namespace conformal {
namespace {

int argmax(std::span<const double> probs) {
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

void require_label(std::span<const double> probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size())) {
        throw std::invalid_argument("label " + std::to_string(label) + " outside [0, " +
                                    std::to_string(probs.size()) + ")");
    }
}

PredictionSet full_set(std::span<const double> probs) {
    return {std::vector<bool>(probs.size(), true), argmax(probs)};
}

// Number of leading labels in `order` whose cumulative score first reaches
// `threshold`; all labels if rounding keeps the total below it.
std::size_t prefix_length(std::span<const double> probs, const std::vector<int>& order,
                          double threshold, double* cumulative = nullptr) {
    double sum = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        sum += probs[static_cast<std::size_t>(order[k])];
        if (sum >= threshold) {
            if (cumulative) *cumulative = sum;
            return k + 1;
        }
    }
    if (cumulative) *cumulative = sum;
    return order.size();
}

PredictionSet prefix_set(std::span<const double> probs, const std::vector<int>& order,
                         std::size_t k) {
    std::vector<bool> included(probs.size(), false);
    for (std::size_t j = 0; j < k; ++j) included[static_cast<std::size_t>(order[j])] = true;
    return {std::move(included), argmax(probs)};
}

}  // namespace

const char* to_string(ClassificationMethod::Kind kind) {
    switch (kind) {
        case ClassificationMethod::Kind::label: return "score";
        case ClassificationMethod::Kind::aps: return "cumulated-score";
        case ClassificationMethod::Kind::aps_randomized: return "random-cumulated-score";
        case ClassificationMethod::Kind::top_k: return "top-k";
        case ClassificationMethod::Kind::naive: return "naive";
    }
    return "unknown";
}

std::vector<int> descending_order(std::span<const double> probs) {
    std::vector<int> order(probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return probs[static_cast<std::size_t>(a)] > probs[static_cast<std::size_t>(b)];
    });
    return order;
}

double label_score(std::span<const double> probs, int label) {
    require_label(probs, label);
    return 1.0 - probs[static_cast<std::size_t>(label)];
}

double cumulated_score(std::span<const double> probs, int label) {
    require_label(probs, label);
    double sum = 0.0;
    for (int y : descending_order(probs)) {
        sum += probs[static_cast<std::size_t>(y)];
        if (y == label) break;
    }
    return std::min(sum, 1.0);
}

double rank_score(std::span<const double> probs, int label) {
    require_label(probs, label);
    const auto order = descending_order(probs);
    return static_cast<double>(std::find(order.begin(), order.end(), label) - order.begin() + 1);
}

PredictionSet label_set(std::span<const double> probs, double q) {
    if (std::isinf(q)) return full_set(probs);
    // Compare in score space so a label is included exactly when its
    // conformity score would fall at or below q.
    std::vector<bool> included(probs.size());
    for (std::size_t y = 0; y < probs.size(); ++y) included[y] = 1.0 - probs[y] <= q;
    return {std::move(included), argmax(probs)};
}

PredictionSet aps_set(std::span<const double> probs, double q) {
    if (std::isinf(q)) return full_set(probs);
    const auto order = descending_order(probs);
    return prefix_set(probs, order, prefix_length(probs, order, q));
}

PredictionSet aps_randomized_set(std::span<const double> probs, double q, double uniform_draw) {
    if (std::isinf(q)) return full_set(probs);
    const auto order = descending_order(probs);
    double cumulative = 0.0;
    std::size_t k = prefix_length(probs, order, q, &cumulative);
    const double last = probs[static_cast<std::size_t>(order[k - 1])];
    if (last > 0.0) {
        const double drop_probability = (cumulative - q) / last;
        if (uniform_draw < drop_probability) --k;
    }
    return prefix_set(probs, order, k);
}

PredictionSet top_k_set(std::span<const double> probs, std::size_t k) {
    const auto order = descending_order(probs);
    return prefix_set(probs, order, std::min(k, order.size()));
}

PredictionSet naive_set(std::span<const double> probs, RiskLevel alpha) {
    const auto order = descending_order(probs);
    return prefix_set(probs, order, prefix_length(probs, order, alpha.coverage()));
}

FittedConformalClassifier calibrate(ClassifierPtr model, const Dataset& calibration,
                                    ClassificationMethod method) {
    using Kind = ClassificationMethod::Kind;
    if (!model) throw std::invalid_argument("calibration needs a model");
    if (!model->is_fitted()) throw std::logic_error("calibration needs a prefit classifier");
    if (method.kind == Kind::naive) return {std::move(model), std::nullopt, method};
    if (calibration.empty()) throw std::invalid_argument("empty calibration set");

    std::vector<double> values(calibration.size());
    ScoreKind kind = ScoreKind::label_score;
    for (std::size_t i = 0; i < calibration.size(); ++i) {
        const double target = calibration.target(i);
        if (target < 0 || target >= model->n_classes() || target != std::floor(target)) {
            throw std::invalid_argument("calibration label at row " + std::to_string(i) +
                                        " is not one of the model's classes");
        }
        const int y = static_cast<int>(target);
        const auto probs = model->predict_scores(calibration.row(i));
        switch (method.kind) {
            case Kind::label:
                values[i] = label_score(probs, y);
                kind = ScoreKind::label_score;
                break;
            case Kind::aps:
            case Kind::aps_randomized:
                values[i] = cumulated_score(probs, y);
                kind = ScoreKind::cumulated_score;
                break;
            case Kind::top_k:
                values[i] = rank_score(probs, y);
                kind = ScoreKind::rank;
                break;
            case Kind::naive:
                break;
        }
    }
    return {std::move(model), ConformityScores(std::move(values), kind), method};
}

double FittedConformalClassifier::quantile(RiskLevel alpha) const {
    if (method_.kind == ClassificationMethod::Kind::naive) return alpha.coverage();
    const double q = conformal_quantile(*scores_, alpha);
    return method_.kind == ClassificationMethod::Kind::top_k ? std::ceil(q) : q;
}

PredictionSet FittedConformalClassifier::set_from_scores(std::span<const double> probs, double q,
                                                         std::size_t row_index) const {
    using Kind = ClassificationMethod::Kind;
    switch (method_.kind) {
        case Kind::label: return label_set(probs, q);
        case Kind::aps: return aps_set(probs, q);
        case Kind::aps_randomized: {
            const double u = Rng::stream(method_.seed, row_index).uniform();
            return aps_randomized_set(probs, q, u);
        }
        case Kind::top_k:
            if (std::isinf(q)) return full_set(probs);
            return top_k_set(probs, static_cast<std::size_t>(q));
        case Kind::naive: break;
    }
    throw std::logic_error("unknown classification method");
}

PredictionSet FittedConformalClassifier::predict_set(std::span<const double> x, RiskLevel alpha,
                                                     std::size_t row_index) const {
    if (method_.kind == ClassificationMethod::Kind::naive) {
        return naive_set(model_->predict_scores(x), alpha);
    }
    return set_from_scores(model_->predict_scores(x), quantile(alpha), row_index);
}

std::vector<PredictionSet> FittedConformalClassifier::predict_set_batch(const Matrix& features,
                                                                        RiskLevel alpha,
                                                                        std::size_t threads) const {
    std::vector<PredictionSet> out(features.rows());
    const double q = quantile(alpha);
    const bool naive = method_.kind == ClassificationMethod::Kind::naive;
    parallel_for(
        features.rows(),
        [&](std::size_t r) {
            const auto probs = model_->predict_scores(features.row(r));
            out[r] = naive ? naive_set(probs, alpha) : set_from_scores(probs, q, r);
        },
        threads);
    return out;
}

}  // namespace conformal
