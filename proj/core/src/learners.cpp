#include "conformal/learners.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "conformal/rng.hpp"

namespace conformal {
namespace {

void require_fitted(bool fitted, const char* what) {
    if (!fitted) throw std::logic_error(std::string(what) + " used before fit");
}

void require_dims(std::span<const double> x, std::size_t dims) {
    if (x.size() != dims) {
        throw std::invalid_argument("feature row has " + std::to_string(x.size()) +
                                    " values, model expects " + std::to_string(dims));
    }
}

}  // namespace

std::vector<double> Regressor::predict(const Matrix& features) const {
    std::vector<double> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) out[i] = predict(features.row(i));
    return out;
}

// ---------------------------------------------------------------------------
// OLS

void OlsRegressor::fit(const Dataset& train) {
    const std::size_t n = train.size();
    const std::size_t d = train.dims();
    if (n == 0) throw std::invalid_argument("cannot fit OLS on an empty dataset");

    const auto p = static_cast<Eigen::Index>(d + 1);
    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), p);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        design(r, 0) = 1.0;
        auto row = train.row(i);
        for (std::size_t j = 0; j < d; ++j) design(r, static_cast<Eigen::Index>(j + 1)) = row[j];
        y(r) = train.target(i);
    }

    Eigen::VectorXd beta;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    ridge_ = qr.rank() < p;
    if (!ridge_) {
        beta = qr.solve(y);
    } else {
        Eigen::MatrixXd gram = design.transpose() * design;
        for (Eigen::Index j = 1; j < p; ++j) gram(j, j) += kRidgeFallback;
        // The intercept column alone is never singular, so a tiny jitter on
        // it is enough to make the system definite when n is also tiny.
        gram(0, 0) += kRidgeFallback * 1e-3;
        beta = gram.ldlt().solve(design.transpose() * y);
    }

    intercept_ = beta(0);
    weights_.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) weights_[j] = beta(static_cast<Eigen::Index>(j + 1));
    fitted_ = true;
}

double OlsRegressor::predict(std::span<const double> x) const {
    require_fitted(fitted_, "OlsRegressor");
    require_dims(x, weights_.size());
    double y = intercept_;
    for (std::size_t j = 0; j < weights_.size(); ++j) y += weights_[j] * x[j];
    return y;
}

std::unique_ptr<Regressor> OlsRegressor::clone() const {
    return std::make_unique<OlsRegressor>();
}

OlsRegressor fit_ols(const Dataset& train) {
    OlsRegressor model;
    model.fit(train);
    return model;
}

// ---------------------------------------------------------------------------
// k-NN

KnnRegressor::KnnRegressor(std::size_t k) : k_(k) {
    if (k_ == 0) throw std::invalid_argument("k-NN requires k >= 1");
}

void KnnRegressor::fit(const Dataset& train) {
    if (k_ > train.size()) {
        throw std::invalid_argument("k-NN with k=" + std::to_string(k_) + " exceeds n=" +
                                    std::to_string(train.size()));
    }
    features_ = train.features();
    targets_.assign(train.targets().begin(), train.targets().end());
    fitted_ = true;
}

double KnnRegressor::predict(std::span<const double> x) const {
    require_fitted(fitted_, "KnnRegressor");
    require_dims(x, features_.cols());

    struct Neighbour {
        double dist2;
        std::size_t index;
    };
    std::vector<Neighbour> all(features_.rows());
    for (std::size_t i = 0; i < features_.rows(); ++i) {
        auto row = features_.row(i);
        double d2 = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double diff = row[j] - x[j];
            d2 += diff * diff;
        }
        all[i] = {d2, i};
    }
    auto closer = [](const Neighbour& a, const Neighbour& b) {
        return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
    };
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k_), all.end(),
                      closer);

    double sum = 0.0;
    for (std::size_t i = 0; i < k_; ++i) sum += targets_[all[i].index];
    return sum / static_cast<double>(k_);
}

std::unique_ptr<Regressor> KnnRegressor::clone() const {
    return std::make_unique<KnnRegressor>(k_);
}

KnnRegressor fit_knn_regressor(const Dataset& train, std::size_t k) {
    KnnRegressor model(k);
    model.fit(train);
    return model;
}

// ---------------------------------------------------------------------------
// constant

ConstantRegressor::ConstantRegressor(double value) : value_(value) {
    if (!std::isfinite(value_)) throw std::invalid_argument("constant prediction must be finite");
}

std::unique_ptr<Regressor> ConstantRegressor::clone() const {
    return std::make_unique<ConstantRegressor>(value_);
}

ConstantRegressor constant_regressor(double value) { return ConstantRegressor(value); }

// ---------------------------------------------------------------------------
// classifiers

Matrix Classifier::predict_scores(const Matrix& features) const {
    Matrix out(features.rows(), static_cast<std::size_t>(n_classes()));
    for (std::size_t i = 0; i < features.rows(); ++i) {
        auto scores = predict_scores(features.row(i));
        std::copy(scores.begin(), scores.end(), out.row(i).begin());
    }
    return out;
}

int Classifier::predict_label(std::span<const double> x) const {
    const auto scores = predict_scores(x);
    return static_cast<int>(std::max_element(scores.begin(), scores.end()) - scores.begin());
}

namespace {

// In-place softmax of `logits`.
void softmax(std::span<double> logits) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& v : logits) {
        v = std::exp(v - top);
        total += v;
    }
    for (double& v : logits) v /= total;
}

}  // namespace

SoftmaxClassifier::SoftmaxClassifier(SoftmaxOptions options) : options_(options) {
    if (options_.l2 < 0) throw std::invalid_argument("l2 penalty must be non-negative");
    if (options_.epochs < 1) throw std::invalid_argument("epochs must be positive");
    if (!(options_.step > 0)) throw std::invalid_argument("step size must be positive");
}

void SoftmaxClassifier::fit(const Dataset& train) {
    if (!train.is_classification()) {
        throw std::invalid_argument("softmax classifier needs a classification dataset");
    }
    const int classes = *train.n_classes();
    const std::size_t n = train.size();
    const std::size_t d = train.dims();
    if (n < static_cast<std::size_t>(classes)) {
        throw std::invalid_argument("fewer training rows than classes");
    }
    std::vector<std::size_t> per_class(static_cast<std::size_t>(classes), 0);
    for (std::size_t i = 0; i < n; ++i) ++per_class[static_cast<std::size_t>(train.label(i))];
    for (int c = 0; c < classes; ++c) {
        if (per_class[static_cast<std::size_t>(c)] == 0) {
            throw std::invalid_argument("class " + std::to_string(c) + " missing from training data");
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        auto ra = train.row(a);
        auto rb = train.row(b);
        if (std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end())) return true;
        if (std::lexicographical_compare(rb.begin(), rb.end(), ra.begin(), ra.end())) return false;
        return train.target(a) < train.target(b);
    });

    center_.assign(d, 0.0);
    scale_.assign(d, 1.0);
    for (std::size_t j = 0; j < d; ++j) {
        double mean = 0.0;
        for (std::size_t i : order) mean += train.row(i)[j];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i : order) {
            const double diff = train.row(i)[j] - mean;
            var += diff * diff;
        }
        var /= static_cast<double>(n);
        center_[j] = mean;
        scale_[j] = var > 0 ? std::sqrt(var) : 1.0;
    }

    const std::size_t width = d + 1;
    Matrix x(n, width);
    std::vector<int> y(n);
    for (std::size_t r = 0; r < n; ++r) {
        auto src = train.row(order[r]);
        for (std::size_t j = 0; j < d; ++j) x(r, j) = (src[j] - center_[j]) / scale_[j];
        x(r, d) = 1.0;
        y[r] = train.label(order[r]);
    }

    n_classes_ = classes;
    dims_ = d;
    weights_.assign(static_cast<std::size_t>(classes) * width, 0.0);
    Rng rng(options_.seed);
    for (double& w : weights_) w = 0.01 * rng.normal();

    std::vector<double> grad(weights_.size());
    std::vector<double> probs(static_cast<std::size_t>(classes));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (int epoch = 1; epoch <= options_.epochs; ++epoch) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            auto row = x.row(r);
            for (int c = 0; c < classes; ++c) {
                const double* w = &weights_[static_cast<std::size_t>(c) * width];
                double z = 0.0;
                for (std::size_t j = 0; j < width; ++j) z += w[j] * row[j];
                probs[static_cast<std::size_t>(c)] = z;
            }
            softmax(probs);
            for (int c = 0; c < classes; ++c) {
                const double err = probs[static_cast<std::size_t>(c)] - (y[r] == c ? 1.0 : 0.0);
                double* g = &grad[static_cast<std::size_t>(c) * width];
                for (std::size_t j = 0; j < width; ++j) g[j] += err * row[j];
            }
        }
        const double step = options_.step / std::sqrt(static_cast<double>(epoch));
        for (int c = 0; c < classes; ++c) {
            for (std::size_t j = 0; j < width; ++j) {
                const std::size_t idx = static_cast<std::size_t>(c) * width + j;
                double g = grad[idx] * inv_n;
                if (j < d) g += options_.l2 * weights_[idx];
                weights_[idx] -= step * g;
            }
        }
    }
    fitted_ = true;
}

std::vector<double> SoftmaxClassifier::predict_scores(std::span<const double> x) const {
    require_fitted(fitted_, "SoftmaxClassifier");
    require_dims(x, dims_);
    const std::size_t width = dims_ + 1;
    std::vector<double> z(static_cast<std::size_t>(n_classes_));
    for (int c = 0; c < n_classes_; ++c) {
        const double* w = &weights_[static_cast<std::size_t>(c) * width];
        double acc = w[dims_];
        for (std::size_t j = 0; j < dims_; ++j) acc += w[j] * (x[j] - center_[j]) / scale_[j];
        z[static_cast<std::size_t>(c)] = acc;
    }
    softmax(z);
    return z;
}

std::unique_ptr<Classifier> SoftmaxClassifier::clone() const {
    return std::make_unique<SoftmaxClassifier>(options_);
}

SoftmaxClassifier fit_softmax_classifier(const Dataset& train, double l2, int epochs,
                                         std::uint64_t seed) {
    SoftmaxOptions options;
    options.l2 = l2;
    options.epochs = epochs;
    options.seed = seed;
    SoftmaxClassifier model(options);
    model.fit(train);
    return model;
}

TemperatureScaledClassifier::TemperatureScaledClassifier(ClassifierPtr base, double temperature)
    : base_(std::move(base)), temperature_(temperature) {
    if (!base_) throw std::invalid_argument("temperature scaling needs a base classifier");
    if (!(temperature_ > 0) || !std::isfinite(temperature_)) {
        throw std::invalid_argument("temperature must be positive and finite");
    }
}

void TemperatureScaledClassifier::fit(const Dataset& train) {
    auto fresh = base_->clone();
    fresh->fit(train);
    base_ = std::move(fresh);
}

std::vector<double> TemperatureScaledClassifier::predict_scores(std::span<const double> x) const {
    auto scores = base_->predict_scores(x);
    for (double& s : scores) s = std::log(s) / temperature_;
    softmax(scores);
    return scores;
}

std::unique_ptr<Classifier> TemperatureScaledClassifier::clone() const {
    return std::make_unique<TemperatureScaledClassifier>(ClassifierPtr(base_->clone()),
                                                         temperature_);
}

}  // namespace conformal
