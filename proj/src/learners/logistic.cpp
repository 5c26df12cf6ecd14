#include <algorithm>
#include <cmath>

#include "common.hpp"

namespace fsnull {

namespace {

// Softmax of `scores` in place; subtracts the max for stability.
void softmax(std::span<double> scores) {
    const double top = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (auto& s : scores) {
        s = std::exp(s - top);
        total += s;
    }
    for (auto& s : scores) s /= total;
}

void class_scores(const Matrix& weights, std::span<const double> row, std::span<double> out) {
    const std::size_t m = row.size();
    for (std::size_t c = 0; c < weights.rows(); ++c) {
        const auto w = weights.row(c);
        double s = w[m];
        for (std::size_t j = 0; j < m; ++j) s += w[j] * row[j];
        out[c] = s;
    }
}

}  // namespace

LogisticModel::LogisticModel(Matrix weights, std::size_t iterations)
    : weights_(std::move(weights)), iterations_(iterations) {}

ProbabilityMatrix LogisticModel::predict_proba(const Matrix& X) const {
    detail::check_predict_shape(feature_count(), X);
    ProbabilityMatrix out(X.rows(), class_count());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto dst = out.row(i);
        class_scores(weights_, X.row(i), dst);
        softmax(dst);
    }
    return out;
}

double logistic_objective(const Matrix& X, std::span<const int> y, const Matrix& weights,
                          double l2_lambda, Matrix* gradient) {
    const std::size_t n = X.rows();
    const std::size_t m = X.cols();
    const std::size_t k = weights.rows();
    if (weights.cols() != m + 1) {
        throw Error(ErrorCode::ShapeMismatch, "weights must have one column per feature plus one");
    }
    if (y.size() != n) throw Error(ErrorCode::LengthMismatch, "label count does not match sample count");
    if (gradient) *gradient = Matrix(k, m + 1, 0.0);

    std::vector<double> p(k);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = X.row(i);
        class_scores(weights, row, p);
        const double top = *std::max_element(p.begin(), p.end());
        double total = 0.0;
        for (const double s : p) total += std::exp(s - top);
        const auto yi = static_cast<std::size_t>(y[i]);
        loss += top + std::log(total) - p[yi];
        if (!gradient) continue;
        softmax(p);
        p[yi] -= 1.0;
        for (std::size_t c = 0; c < k; ++c) {
            auto g = gradient->row(c);
            for (std::size_t j = 0; j < m; ++j) g[j] += p[c] * row[j];
            g[m] += p[c];
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n);
    loss *= inv_n;
    double penalty = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const auto w = weights.row(c);
        for (std::size_t j = 0; j < m; ++j) penalty += w[j] * w[j];
    }
    loss += 0.5 * l2_lambda * penalty;
    if (gradient) {
        for (std::size_t c = 0; c < k; ++c) {
            auto g = gradient->row(c);
            const auto w = weights.row(c);
            for (std::size_t j = 0; j < m; ++j) g[j] = g[j] * inv_n + l2_lambda * w[j];
            g[m] *= inv_n;
        }
    }
    return loss;
}

LogisticModel fit_logistic(const Matrix& X, const LabelVector& y, const LogisticHyper& hyper,
                           std::uint64_t /*seed*/) {
    detail::check_training_input(X, y, "logistic regression");
    if (hyper.l2_lambda < 0.0 || hyper.learning_rate <= 0.0 || hyper.tolerance <= 0.0) {
        throw Error(ErrorCode::InvalidArgument, "logistic hyperparameters out of range");
    }
    const std::size_t m = X.cols();
    const std::size_t k = y.class_count();

    // The softmax cross-entropy Hessian is bounded by 1/2 * max ||[x, 1]||^2.
    double max_sq = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        double sq = 1.0;
        for (const double v : X.row(i)) sq += v * v;
        max_sq = std::max(max_sq, sq);
    }
    const double step = hyper.learning_rate / (0.5 * max_sq + hyper.l2_lambda);

    Matrix weights(k, m + 1, 0.0);
    Matrix gradient;
    std::size_t it = 0;
    for (; it < hyper.max_iters; ++it) {
        logistic_objective(X, y.labels, weights, hyper.l2_lambda, &gradient);
        double max_abs = 0.0;
        for (const double g : gradient.data()) max_abs = std::max(max_abs, std::abs(g));
        if (max_abs < hyper.tolerance) break;
        auto w = weights.data();
        const auto g = gradient.data();
        for (std::size_t i = 0; i < w.size(); ++i) w[i] -= step * g[i];
    }
    return LogisticModel(std::move(weights), it);
}

}  // namespace fsnull
