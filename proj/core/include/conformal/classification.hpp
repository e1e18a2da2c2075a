#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "conformal/learners.hpp"
#include "conformal/types.hpp"

namespace conformal {

/// Set-construction rule.
///  - label: threshold sets {y : p_y >= 1 - q}; may be empty.
///  - aps: shortest prefix of the descending ordering whose cumulative score
///    reaches q; never empty.
///  - aps_randomized: aps, then the last label is dropped with probability
///    (C_k - q) / p_{pi_k}; may be empty.
///  - top_k: the ceil(q) highest-scoring labels, q a quantile of true-label
///    ranks.
///  - naive: uncalibrated prefix whose raw cumulative score reaches 1 - alpha.
struct ClassificationMethod {
    enum class Kind { label, aps, aps_randomized, top_k, naive };

    Kind kind = Kind::label;
    std::uint64_t seed = 0;

    static ClassificationMethod label() { return {Kind::label, 0}; }
    static ClassificationMethod aps() { return {Kind::aps, 0}; }
    static ClassificationMethod aps_randomized(std::uint64_t seed) {
        return {Kind::aps_randomized, seed};
    }
    static ClassificationMethod top_k() { return {Kind::top_k, 0}; }
    static ClassificationMethod naive() { return {Kind::naive, 0}; }
};

const char* to_string(ClassificationMethod::Kind kind);

// Primitives on a single probability vector. Descending order breaks ties
// by ascending class index.
std::vector<int> descending_order(std::span<const double> probs);
double label_score(std::span<const double> probs, int label);
double cumulated_score(std::span<const double> probs, int label);
double rank_score(std::span<const double> probs, int label);

PredictionSet label_set(std::span<const double> probs, double q);
PredictionSet aps_set(std::span<const double> probs, double q);
PredictionSet aps_randomized_set(std::span<const double> probs, double q, double uniform_draw);
PredictionSet top_k_set(std::span<const double> probs, std::size_t k);
PredictionSet naive_set(std::span<const double> probs, RiskLevel alpha);

/// Split-conformal classifier. The quantile is computed per call from the
/// stored scores, so one calibration serves any alpha.
class FittedConformalClassifier {
public:
    /// `row_index` selects the uniform draw for aps_randomized; the draw for
    /// row i is Rng::stream(seed, i).uniform(), so batch and per-row calls
    /// agree.
    PredictionSet predict_set(std::span<const double> x, RiskLevel alpha,
                              std::size_t row_index = 0) const;
    std::vector<PredictionSet> predict_set_batch(const Matrix& features, RiskLevel alpha,
                                                 std::size_t threads = 1) const;

    /// Calibrated threshold: conformal quantile of the scores (ceil'd for
    /// top_k, possibly +inf), or 1 - alpha for naive.
    double quantile(RiskLevel alpha) const;

    const ClassifierPtr& model() const noexcept { return model_; }
    const std::optional<ConformityScores>& scores() const noexcept { return scores_; }
    ClassificationMethod method() const noexcept { return method_; }

private:
    friend FittedConformalClassifier calibrate(ClassifierPtr, const Dataset&,
                                               ClassificationMethod);
    FittedConformalClassifier(ClassifierPtr model, std::optional<ConformityScores> scores,
                              ClassificationMethod method)
        : model_(std::move(model)), scores_(std::move(scores)), method_(method) {}

    PredictionSet set_from_scores(std::span<const double> probs, double q,
                                  std::size_t row_index) const;

    ClassifierPtr model_;
    std::optional<ConformityScores> scores_;
    ClassificationMethod method_;
};

/// `model` must already be fitted. For naive the calibration set is ignored
/// and may be empty.
FittedConformalClassifier calibrate(ClassifierPtr model, const Dataset& calibration,
                                    ClassificationMethod method);

}  // namespace conformal
