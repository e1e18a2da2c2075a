#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace conformal {

/// Miscoverage rate. Every quantile index in the library is driven by one of
/// these; construction rejects anything outside the open interval (0, 1).
class RiskLevel {
public:
    explicit RiskLevel(double alpha);

    double value() const noexcept { return alpha_; }
    double coverage() const noexcept { return 1.0 - alpha_; }

    friend bool operator==(RiskLevel, RiskLevel) = default;

private:
    double alpha_;
};

/// Dense row-major matrix of doubles. Rows are handed out as spans so that
/// learners never see raw pointers.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0; }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const {
        return {values_.data() + r * cols_, cols_};
    }
    std::span<double> row(std::size_t r) { return {values_.data() + r * cols_, cols_}; }

    std::span<const double> values() const noexcept { return values_; }

    /// Copies the listed rows, in the order given.
    Matrix select_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Feature matrix plus target vector. Classification datasets carry
/// n_classes and store labels as exact small integers in the target vector.
class Dataset {
public:
    static Dataset regression(Matrix features, std::vector<double> targets,
                              std::vector<std::string> feature_names = {});
    static Dataset classification(Matrix features, std::vector<int> labels, int n_classes,
                                  std::vector<std::string> feature_names = {});

    std::size_t size() const noexcept { return targets_.size(); }
    std::size_t dims() const noexcept { return features_.cols(); }
    bool empty() const noexcept { return targets_.empty(); }

    const Matrix& features() const noexcept { return features_; }
    std::span<const double> targets() const noexcept { return targets_; }
    std::span<const double> row(std::size_t i) const { return features_.row(i); }
    double target(std::size_t i) const { return targets_[i]; }
    int label(std::size_t i) const { return static_cast<int>(targets_[i]); }

    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    std::optional<int> n_classes() const noexcept { return n_classes_; }
    bool is_classification() const noexcept { return n_classes_.has_value(); }

    Dataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    Dataset(Matrix features, std::vector<double> targets, std::vector<std::string> names,
            std::optional<int> n_classes);

    Matrix features_;
    std::vector<double> targets_;
    std::vector<std::string> feature_names_;
    std::optional<int> n_classes_;
};

enum class ScoreKind { absolute_residual, signed_residual, label_score, cumulated_score, rank };

const char* to_string(ScoreKind kind);

/// Calibration scores with multiset semantics: order carries no meaning,
/// duplicates are kept.
class ConformityScores {
public:
    ConformityScores(std::vector<double> values, ScoreKind kind);

    std::span<const double> values() const noexcept { return values_; }
    ScoreKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

private:
    std::vector<double> values_;
    ScoreKind kind_;
};

/// Closed interval [lower, upper]; either bound may be infinite. The point
/// need not lie inside (plus-style bounds are quantiles of shifted ensembles).
struct PredictionInterval {
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    PredictionInterval() = default;
    PredictionInterval(double point, double lower, double upper);

    bool contains(double y) const noexcept { return lower <= y && y <= upper; }
    double width() const noexcept { return upper - lower; }
    bool bounded() const noexcept;

    friend bool operator==(const PredictionInterval&, const PredictionInterval&) = default;
};

struct PredictionSet {
    std::vector<bool> included;
    int point_label = 0;

    PredictionSet() = default;
    PredictionSet(std::vector<bool> included, int point_label);

    int n_classes() const noexcept { return static_cast<int>(included.size()); }
    bool contains(int label) const;
    std::size_t size() const noexcept;
    bool empty() const noexcept { return size() == 0; }
    std::vector<int> labels() const;

    friend bool operator==(const PredictionSet&, const PredictionSet&) = default;
};

enum class Aggregation { mean, median };

const char* to_string(Aggregation agg);

/// Mean, or lower-middle element for median of an even count.
double aggregate(std::span<const double> values, Aggregation agg);

}  // namespace conformal
