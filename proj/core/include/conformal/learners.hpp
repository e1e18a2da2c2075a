#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "conformal/types.hpp"

namespace conformal {

/// Base regressor contract used by every regression engine.
///
/// Implementations must be deterministic: fitting twice on the same data with
/// the same hyperparameters gives bit-identical predictions. `clone()`
/// returns an unfitted copy with the same hyperparameters; cross-conformal
/// engines call it once per fold or resample.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual void fit(const Dataset& train) = 0;
    virtual double predict(std::span<const double> x) const = 0;
    virtual bool is_fitted() const = 0;
    virtual std::unique_ptr<Regressor> clone() const = 0;
    virtual std::string name() const = 0;

    std::vector<double> predict(const Matrix& features) const;
};

using RegressorPtr = std::shared_ptr<const Regressor>;

/// Least squares with intercept. Rank-deficient designs fall back to a ridge
/// solve with penalty 1e-8 on the slope coefficients.
class OlsRegressor final : public Regressor {
public:
    static constexpr double kRidgeFallback = 1e-8;

    void fit(const Dataset& train) override;
    using Regressor::predict;
    double predict(std::span<const double> x) const override;
    bool is_fitted() const override { return fitted_; }
    std::unique_ptr<Regressor> clone() const override;
    std::string name() const override { return "ols"; }

    double intercept() const noexcept { return intercept_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    bool used_ridge_fallback() const noexcept { return ridge_; }

private:
    double intercept_ = 0.0;
    std::vector<double> weights_;
    bool fitted_ = false;
    bool ridge_ = false;
};

/// Brute-force k nearest neighbours (Euclidean); distance ties go to the
/// lower training row index.
class KnnRegressor final : public Regressor {
public:
    explicit KnnRegressor(std::size_t k);

    void fit(const Dataset& train) override;
    using Regressor::predict;
    double predict(std::span<const double> x) const override;
    bool is_fitted() const override { return fitted_; }
    std::unique_ptr<Regressor> clone() const override;
    std::string name() const override { return "knn"; }

    std::size_t k() const noexcept { return k_; }

private:
    std::size_t k_;
    Matrix features_;
    std::vector<double> targets_;
    bool fitted_ = false;
};

/// Predicts a fixed value. Always fitted; fit() is a no-op.
class ConstantRegressor final : public Regressor {
public:
    explicit ConstantRegressor(double value);

    void fit(const Dataset&) override {}
    using Regressor::predict;
    double predict(std::span<const double>) const override { return value_; }
    bool is_fitted() const override { return true; }
    std::unique_ptr<Regressor> clone() const override;
    std::string name() const override { return "constant"; }

private:
    double value_;
};

OlsRegressor fit_ols(const Dataset& train);
KnnRegressor fit_knn_regressor(const Dataset& train, std::size_t k);
ConstantRegressor constant_regressor(double value);

/// Base classifier contract. Score rows are probability vectors:
/// non-negative and summing to 1 within 1e-9.
class Classifier {
public:
    virtual ~Classifier() = default;

    virtual void fit(const Dataset& train) = 0;
    virtual std::vector<double> predict_scores(std::span<const double> x) const = 0;
    virtual int n_classes() const = 0;
    virtual bool is_fitted() const = 0;
    virtual std::unique_ptr<Classifier> clone() const = 0;

    Matrix predict_scores(const Matrix& features) const;
    /// argmax of the score row, lowest class index on ties.
    int predict_label(std::span<const double> x) const;
};

using ClassifierPtr = std::shared_ptr<const Classifier>;

struct SoftmaxOptions {
    double l2 = 1e-3;
    int epochs = 500;
    double step = 0.1;  // decays as step / sqrt(t)
    std::uint64_t seed = 0;
};

/// Multinomial logistic regression trained by full-batch gradient descent on
/// standardised features.
///
/// Training rows are first put in a canonical (lexicographic) order, so the
/// fitted model does not depend on the order rows were supplied in.
class SoftmaxClassifier final : public Classifier {
public:
    explicit SoftmaxClassifier(SoftmaxOptions options = {});

    void fit(const Dataset& train) override;
    using Classifier::predict_scores;
    std::vector<double> predict_scores(std::span<const double> x) const override;
    int n_classes() const override { return n_classes_; }
    bool is_fitted() const override { return fitted_; }
    std::unique_ptr<Classifier> clone() const override;

    const SoftmaxOptions& options() const noexcept { return options_; }

private:
    SoftmaxOptions options_;
    int n_classes_ = 0;
    std::size_t dims_ = 0;
    std::vector<double> center_;
    std::vector<double> scale_;
    // n_classes x (dims + 1); last column is the bias.
    std::vector<double> weights_;
    bool fitted_ = false;
};

SoftmaxClassifier fit_softmax_classifier(const Dataset& train, double l2, int epochs,
                                         std::uint64_t seed);

/// Wraps a fitted classifier and rescales its scores as p^(1/T) / sum, i.e.
/// divides the logits by T. T < 1 sharpens (over-confident), T > 1 flattens.
class TemperatureScaledClassifier final : public Classifier {
public:
    TemperatureScaledClassifier(ClassifierPtr base, double temperature);

    void fit(const Dataset& train) override;
    using Classifier::predict_scores;
    std::vector<double> predict_scores(std::span<const double> x) const override;
    int n_classes() const override { return base_->n_classes(); }
    bool is_fitted() const override { return base_->is_fitted(); }
    std::unique_ptr<Classifier> clone() const override;

    double temperature() const noexcept { return temperature_; }

private:
    ClassifierPtr base_;
    double temperature_;
};

}  // namespace conformal
