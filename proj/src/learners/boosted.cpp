#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"

namespace fsnull {

namespace {

constexpr double kLeafBound = 10.0;
constexpr double kPriorClamp = 1e-6;

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + exp(z)) - y * z
double log_loss(double score, double target) {
    const double softplus = score > 0.0 ? score + std::log1p(std::exp(-score))
                                        : std::log1p(std::exp(score));
    return softplus - target * score;
}

struct LeafSamples {
    std::size_t node;
    std::vector<std::size_t> samples;
};

// Depth-limited least-squares tree on `residuals`. Leaves are returned with
// their samples so the caller can set the leaf values.
RegressionTree grow_regression_tree(const Matrix& X, const std::vector<double>& residuals,
                                    std::size_t max_depth, std::vector<LeafSamples>& leaves) {
    struct Pending {
        std::size_t node;
        std::size_t depth;
        std::vector<std::size_t> samples;
    };
    struct Entry {
        double value;
        std::size_t sample;
    };

    RegressionTree tree;
    tree.nodes.emplace_back();
    leaves.clear();
    std::vector<std::size_t> all(X.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::vector<Pending> stack{{0, 0, std::move(all)}};
    std::vector<Entry> buffer;

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();

        bool found = false;
        std::size_t best_feature = 0;
        double best_threshold = 0.0;
        double best_score = 0.0;
        if (job.depth < max_depth && job.samples.size() >= 2) {
            double total = 0.0;
            for (const auto s : job.samples) total += residuals[s];
            for (std::size_t f = 0; f < X.cols(); ++f) {
                buffer.clear();
                for (const auto s : job.samples) buffer.push_back({X(s, f), s});
                std::sort(buffer.begin(), buffer.end(), [](const Entry& a, const Entry& b) {
                    return a.value < b.value || (a.value == b.value && a.sample < b.sample);
                });
                if (buffer.front().value == buffer.back().value) continue;
                double left = 0.0;
                const std::size_t n = buffer.size();
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    left += residuals[buffer[i].sample];
                    if (buffer[i].value == buffer[i + 1].value) continue;
                    const double right = total - left;
                    const double score = left * left / static_cast<double>(i + 1) +
                                         right * right / static_cast<double>(n - i - 1);
                    // Strict improvement keeps the lowest feature, then threshold.
                    if (!found || score > best_score) {
                        const double a = buffer[i].value;
                        const double b = buffer[i + 1].value;
                        const double mid = a + (b - a) / 2.0;
                        found = true;
                        best_feature = f;
                        best_threshold = mid < b ? mid : a;
                        best_score = score;
                    }
                }
            }
        }
        if (!found) {
            leaves.push_back({job.node, std::move(job.samples)});
            continue;
        }
        std::vector<std::size_t> left, right;
        for (const auto s : job.samples) {
            (X(s, best_feature) <= best_threshold ? left : right).push_back(s);
        }
        const auto left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[job.node];
        node.feature = static_cast<int>(best_feature);
        node.threshold = best_threshold;
        node.left = left_id;
        node.right = left_id + 1;
        stack.push_back({static_cast<std::size_t>(left_id + 1), job.depth + 1, std::move(right)});
        stack.push_back({static_cast<std::size_t>(left_id), job.depth + 1, std::move(left)});
    }
    return tree;
}

// Exact minimiser over [-kLeafBound, kLeafBound] of
//   sum_i log_loss(score_i + gamma, target_i)
// via safeguarded Newton on the (monotone) derivative.
double optimal_leaf_value(const std::vector<std::size_t>& samples, const std::vector<double>& scores,
                          const std::vector<double>& targets) {
    auto derivative = [&](double gamma, double* curvature) {
        double d = 0.0;
        double h = 0.0;
        for (const auto s : samples) {
            const double p = sigmoid(scores[s] + gamma);
            d += p - targets[s];
            h += p * (1.0 - p);
        }
        if (curvature) *curvature = h;
        return d;
    };
    double lo = -kLeafBound;
    double hi = kLeafBound;
    if (derivative(lo, nullptr) >= 0.0) return lo;
    if (derivative(hi, nullptr) <= 0.0) return hi;
    double gamma = 0.0;
    for (int it = 0; it < 100; ++it) {
        double h = 0.0;
        const double d = derivative(gamma, &h);
        if (d == 0.0) break;
        (d > 0.0 ? hi : lo) = gamma;
        double next = h > 0.0 ? gamma - d / h : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - gamma) <= 1e-12 * std::max(1.0, std::abs(gamma))) {
            gamma = next;
            break;
        }
        gamma = next;
    }
    return gamma;
}

}  // namespace

double RegressionTree::predict(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes[at].feature >= 0) {
        const auto& node = nodes[at];
        at = static_cast<std::size_t>(
            row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right);
    }
    return nodes[at].value;
}

BoostedModel::BoostedModel(std::vector<Stage> scorers, std::size_t class_count,
                           std::size_t feature_count, double learning_rate,
                           std::vector<double> loss_history)
    : scorers_(std::move(scorers)),
      class_count_(class_count),
      feature_count_(feature_count),
      learning_rate_(learning_rate),
      loss_history_(std::move(loss_history)) {}

ProbabilityMatrix BoostedModel::predict_proba(const Matrix& X) const {
    detail::check_predict_shape(feature_count_, X);
    ProbabilityMatrix out(X.rows(), class_count_);
    std::vector<double> scores(scorers_.size());
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto row = X.row(i);
        for (std::size_t s = 0; s < scorers_.size(); ++s) {
            double score = scorers_[s].initial_score;
            for (const auto& tree : scorers_[s].trees) score += learning_rate_ * tree.predict(row);
            scores[s] = score;
        }
        auto dst = out.row(i);
        if (class_count_ == 2) {
            dst[1] = sigmoid(scores[0]);
            dst[0] = 1.0 - dst[1];
        } else {
            double total = 0.0;
            for (std::size_t c = 0; c < class_count_; ++c) total += (dst[c] = sigmoid(scores[c]));
            for (auto& v : dst) v /= total;
        }
    }
    return out;
}

BoostedModel fit_boosted(const Matrix& X, const LabelVector& y, const BoostHyper& hyper,
                         std::uint64_t /*seed*/) {
    detail::check_training_input(X, y, "gradient boosting");
    if (hyper.n_rounds < 1 || !(hyper.learning_rate > 0.0 && hyper.learning_rate <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "boosting needs n_rounds >= 1 and learning rate in (0, 1]");
    }
    const auto counts = y.class_counts();
    if (std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) < 2) {
        throw Error(ErrorCode::DegenerateInput, "gradient boosting: training labels hold a single class");
    }

    const std::size_t n = X.rows();
    const std::size_t k = y.class_count();
    const std::size_t n_scorers = k == 2 ? 1 : k;

    std::vector<BoostedModel::Stage> scorers(n_scorers);
    std::vector<std::vector<double>> targets(n_scorers, std::vector<double>(n));
    std::vector<std::vector<double>> scores(n_scorers);
    for (std::size_t s = 0; s < n_scorers; ++s) {
        const int positive = k == 2 ? 1 : static_cast<int>(s);
        for (std::size_t i = 0; i < n; ++i) targets[s][i] = y.labels[i] == positive ? 1.0 : 0.0;
        const double prior = std::clamp(
            static_cast<double>(counts[static_cast<std::size_t>(positive)]) / static_cast<double>(n),
            kPriorClamp, 1.0 - kPriorClamp);
        scorers[s].initial_score = std::log(prior / (1.0 - prior));
        scores[s].assign(n, scorers[s].initial_score);
        scorers[s].trees.reserve(hyper.n_rounds);
    }

    auto mean_loss = [&] {
        double total = 0.0;
        for (std::size_t s = 0; s < n_scorers; ++s) {
            for (std::size_t i = 0; i < n; ++i) total += log_loss(scores[s][i], targets[s][i]);
        }
        return total / static_cast<double>(n);
    };

    std::vector<double> history{mean_loss()};
    std::vector<double> residuals(n);
    std::vector<LeafSamples> leaves;
    for (std::size_t round = 0; round < hyper.n_rounds; ++round) {
        for (std::size_t s = 0; s < n_scorers; ++s) {
            for (std::size_t i = 0; i < n; ++i) residuals[i] = targets[s][i] - sigmoid(scores[s][i]);
            RegressionTree tree = grow_regression_tree(X, residuals, hyper.tree_depth, leaves);
            for (const auto& leaf : leaves) {
                const double value = optimal_leaf_value(leaf.samples, scores[s], targets[s]);
                tree.nodes[leaf.node].value = value;
                for (const auto i : leaf.samples) scores[s][i] += hyper.learning_rate * value;
            }
            scorers[s].trees.push_back(std::move(tree));
        }
        history.push_back(mean_loss());
    }
    return BoostedModel(std::move(scorers), k, X.cols(), hyper.learning_rate, std::move(history));
}

}  // namespace fsnull
