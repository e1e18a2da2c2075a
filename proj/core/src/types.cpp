#include "conformal/types.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace conformal {

RiskLevel::RiskLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("risk level alpha must lie in (0, 1), got " +
                                    std::to_string(alpha));
    }
}

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw std::invalid_argument("matrix value count does not match its shape");
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) throw std::out_of_range("row index out of range");
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Dataset::Dataset(Matrix features, std::vector<double> targets, std::vector<std::string> names,
                 std::optional<int> n_classes)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      feature_names_(std::move(names)),
      n_classes_(n_classes) {
    if (features_.rows() != targets_.size()) {
        throw std::invalid_argument("feature row count (" + std::to_string(features_.rows()) +
                                    ") does not match target length (" +
                                    std::to_string(targets_.size()) + ")");
    }
    if (!feature_names_.empty() && feature_names_.size() != features_.cols()) {
        throw std::invalid_argument("feature name count does not match feature dimension");
    }
    for (double v : features_.values()) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite feature value");
    }
    for (double v : targets_) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite target value");
    }
    if (n_classes_) {
        if (*n_classes_ < 1) throw std::invalid_argument("n_classes must be positive");
        for (double v : targets_) {
            if (v < 0 || v >= *n_classes_ || v != std::floor(v)) {
                throw std::invalid_argument("class label outside [0, n_classes)");
            }
        }
    }
}

Dataset Dataset::regression(Matrix features, std::vector<double> targets,
                            std::vector<std::string> feature_names) {
    return Dataset(std::move(features), std::move(targets), std::move(feature_names), std::nullopt);
}

Dataset Dataset::classification(Matrix features, std::vector<int> labels, int n_classes,
                                std::vector<std::string> feature_names) {
    std::vector<double> targets(labels.begin(), labels.end());
    return Dataset(std::move(features), std::move(targets), std::move(feature_names), n_classes);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    std::vector<double> targets;
    targets.reserve(indices.size());
    for (std::size_t i : indices) {
        if (i >= targets_.size()) throw std::out_of_range("dataset index out of range");
        targets.push_back(targets_[i]);
    }
    return Dataset(features_.select_rows(indices), std::move(targets), feature_names_, n_classes_);
}

const char* to_string(ScoreKind kind) {
    switch (kind) {
        case ScoreKind::absolute_residual: return "absolute_residual";
        case ScoreKind::signed_residual: return "signed_residual";
        case ScoreKind::label_score: return "label_score";
        case ScoreKind::cumulated_score: return "cumulated_score";
        case ScoreKind::rank: return "rank";
    }
    return "unknown";
}

ConformityScores::ConformityScores(std::vector<double> values, ScoreKind kind)
    : values_(std::move(values)), kind_(kind) {
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite conformity score");
        switch (kind_) {
            case ScoreKind::absolute_residual:
                if (v < 0) throw std::invalid_argument("absolute residual score is negative");
                break;
            case ScoreKind::label_score:
            case ScoreKind::cumulated_score:
                if (v < 0 || v > 1) throw std::invalid_argument("probability score outside [0, 1]");
                break;
            case ScoreKind::rank:
                if (v < 1 || v != std::floor(v)) {
                    throw std::invalid_argument("rank score must be an integer >= 1");
                }
                break;
            case ScoreKind::signed_residual:
                break;
        }
    }
}

PredictionInterval::PredictionInterval(double point_, double lower_, double upper_)
    : point(point_), lower(lower_), upper(upper_) {
    if (std::isnan(point) || std::isnan(lower) || std::isnan(upper)) {
        throw std::invalid_argument("prediction interval contains NaN");
    }
    if (lower > upper) throw std::invalid_argument("prediction interval has lower > upper");
}

bool PredictionInterval::bounded() const noexcept {
    return std::isfinite(lower) && std::isfinite(upper);
}

PredictionSet::PredictionSet(std::vector<bool> included_, int point_label_)
    : included(std::move(included_)), point_label(point_label_) {
    if (point_label < 0 || point_label >= static_cast<int>(included.size())) {
        throw std::invalid_argument("point label outside [0, n_classes)");
    }
}

bool PredictionSet::contains(int label) const {
    return label >= 0 && label < n_classes() && included[static_cast<std::size_t>(label)];
}

std::size_t PredictionSet::size() const noexcept {
    return static_cast<std::size_t>(std::count(included.begin(), included.end(), true));
}

std::vector<int> PredictionSet::labels() const {
    std::vector<int> out;
    for (int y = 0; y < n_classes(); ++y) {
        if (included[static_cast<std::size_t>(y)]) out.push_back(y);
    }
    return out;
}

const char* to_string(Aggregation agg) {
    return agg == Aggregation::mean ? "mean" : "median";
}

double aggregate(std::span<const double> values, Aggregation agg) {
    if (values.empty()) throw std::invalid_argument("cannot aggregate an empty set of predictions");
    if (agg == Aggregation::mean) {
        double sum = 0.0;
        for (double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    std::vector<double> copy(values.begin(), values.end());
    auto mid = copy.begin() + static_cast<std::ptrdiff_t>((copy.size() - 1) / 2);
    std::nth_element(copy.begin(), mid, copy.end());
    return *mid;
}

}  // namespace conformal
