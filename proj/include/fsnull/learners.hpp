#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fsnull/data.hpp"
#include "fsnull/matrix.hpp"

namespace fsnull {

/// Rows are samples, columns are classes in LabelVector order; each row
/// sums to one.
using ProbabilityMatrix = Matrix;

enum class LearnerKind { Tree, Forest, Logistic, Boosted };

std::string_view to_string(LearnerKind kind) noexcept;
/// Accepts the short CLI names (dt, rf, lr, gbm) and the long ones.
std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept;

/// How many features a tree inspects at each split.
struct FeatureRule {
    enum class Kind { All, Sqrt, Fixed };
    Kind kind = Kind::All;
    std::size_t count = 0;  // only for Fixed

    static FeatureRule all() noexcept { return {Kind::All, 0}; }
    static FeatureRule sqrt() noexcept { return {Kind::Sqrt, 0}; }
    static FeatureRule fixed(std::size_t m) noexcept { return {Kind::Fixed, m}; }

    std::size_t resolve(std::size_t n_features) const;
};

/// 1 - sum_c (n_c / n)^2; zero for an empty node.
double gini_impurity(std::span<const std::size_t> class_counts) noexcept;

struct TreeHyper {
    std::optional<std::size_t> max_depth;  // unlimited when empty
    std::size_t min_samples_split = 2;
    FeatureRule max_features = FeatureRule::all();
};

struct ForestHyper {
    std::size_t n_trees = 100;
    TreeHyper tree{std::nullopt, 2, FeatureRule::sqrt()};
    bool bootstrap = true;
};

struct LogisticHyper {
    double l2_lambda = 0.01;
    /// Step size in units of 1/L, where L bounds the curvature of the
    /// objective; values <= 1 make every step a descent step.
    double learning_rate = 1.0;
    std::size_t max_iters = 1000;
    double tolerance = 1e-6;
};

struct BoostHyper {
    std::size_t n_rounds = 100;
    double learning_rate = 0.1;
    std::size_t tree_depth = 3;
};

/// CART node. Leaves have feature == -1 and own `class_count` entries of
/// the model's value buffer starting at `value_offset`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::size_t value_offset = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class TreeModel {
public:
    TreeModel() = default;
    TreeModel(std::vector<TreeNode> nodes, std::vector<double> values, std::size_t class_count,
              std::size_t feature_count);

    std::size_t class_count() const noexcept { return class_count_; }
    std::size_t feature_count() const noexcept { return feature_count_; }
    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    std::size_t depth() const;
    std::size_t leaf_count() const;

    /// Leaf distribution reached by one sample.
    std::span<const double> leaf_for(std::span<const double> row) const;
    ProbabilityMatrix predict_proba(const Matrix& X) const;

    friend bool operator==(const TreeModel&, const TreeModel&) = default;

private:
    std::vector<TreeNode> nodes_;
    std::vector<double> values_;
    std::size_t class_count_ = 0;
    std::size_t feature_count_ = 0;
};

class ForestModel {
public:
    ForestModel() = default;
    explicit ForestModel(std::vector<TreeModel> trees);

    std::size_t class_count() const noexcept { return trees_.front().class_count(); }
    std::size_t feature_count() const noexcept { return trees_.front().feature_count(); }
    const std::vector<TreeModel>& trees() const noexcept { return trees_; }

    ProbabilityMatrix predict_proba(const Matrix& X) const;

    friend bool operator==(const ForestModel&, const ForestModel&) = default;

private:
    std::vector<TreeModel> trees_;
};

/// Multinomial softmax regression. `weights` is k x (m + 1), the last
/// column holding the intercepts.
class LogisticModel {
public:
    LogisticModel() = default;
    LogisticModel(Matrix weights, std::size_t iterations);

    std::size_t class_count() const noexcept { return weights_.rows(); }
    std::size_t feature_count() const noexcept { return weights_.cols() - 1; }
    const Matrix& weights() const noexcept { return weights_; }
    std::size_t iterations() const noexcept { return iterations_; }

    ProbabilityMatrix predict_proba(const Matrix& X) const;

    friend bool operator==(const LogisticModel&, const LogisticModel&) = default;

private:
    Matrix weights_;
    std::size_t iterations_ = 0;
};

/// Regression tree used as a boosting stage; leaves hold additive scores.
struct RegressionTree {
    struct Node {
        int feature = -1;
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        double value = 0.0;

        friend bool operator==(const Node&, const Node&) = default;
    };
    std::vector<Node> nodes;

    double predict(std::span<const double> row) const;

    friend bool operator==(const RegressionTree&, const RegressionTree&) = default;
};

/// Gradient-boosted trees under logistic loss. Binary problems keep one
/// score for class 1; k > 2 keeps one one-vs-rest score per class.
class BoostedModel {
public:
    struct Stage {
        double initial_score = 0.0;
        std::vector<RegressionTree> trees;

        friend bool operator==(const Stage&, const Stage&) = default;
    };

    BoostedModel() = default;
    BoostedModel(std::vector<Stage> scorers, std::size_t class_count, std::size_t feature_count,
                 double learning_rate, std::vector<double> loss_history);

    std::size_t class_count() const noexcept { return class_count_; }
    std::size_t feature_count() const noexcept { return feature_count_; }
    /// Mean training log-loss before the first round and after each round.
    const std::vector<double>& loss_history() const noexcept { return loss_history_; }

    ProbabilityMatrix predict_proba(const Matrix& X) const;

    friend bool operator==(const BoostedModel&, const BoostedModel&) = default;

private:
    std::vector<Stage> scorers_;
    std::size_t class_count_ = 0;
    std::size_t feature_count_ = 0;
    double learning_rate_ = 0.1;
    std::vector<double> loss_history_;
};

/// Any trained learner. Immutable once built.
class Model {
public:
    using Variant = std::variant<TreeModel, ForestModel, LogisticModel, BoostedModel>;

    Model(TreeModel m) : impl_(std::move(m)) {}
    Model(ForestModel m) : impl_(std::move(m)) {}
    Model(LogisticModel m) : impl_(std::move(m)) {}
    Model(BoostedModel m) : impl_(std::move(m)) {}

    LearnerKind kind() const noexcept { return static_cast<LearnerKind>(impl_.index()); }
    std::size_t class_count() const;
    std::size_t feature_count() const;
    const Variant& variant() const noexcept { return impl_; }

    friend bool operator==(const Model&, const Model&) = default;

private:
    Variant impl_;
};

/// Throws ShapeMismatch unless X has model.feature_count() columns.
ProbabilityMatrix predict_proba(const Model& model, const Matrix& X);

TreeModel fit_tree(const Matrix& X, const LabelVector& y, const TreeHyper& hyper,
                   std::uint64_t seed);

/// Seed handed to tree `t` of a forest grown from `seed`.
std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t t) noexcept;

ForestModel fit_forest(const Matrix& X, const LabelVector& y, const ForestHyper& hyper,
                       std::uint64_t seed);

LogisticModel fit_logistic(const Matrix& X, const LabelVector& y, const LogisticHyper& hyper,
                           std::uint64_t seed);

/// Mean cross-entropy plus (l2 / 2) * ||W||^2 (intercepts unpenalised).
/// Writes d(objective)/d(weights) into `gradient` when non-null.
double logistic_objective(const Matrix& X, std::span<const int> y, const Matrix& weights,
                          double l2_lambda, Matrix* gradient);

BoostedModel fit_boosted(const Matrix& X, const LabelVector& y, const BoostHyper& hyper,
                         std::uint64_t seed);

struct LearnerConfig {
    LearnerKind kind = LearnerKind::Forest;
    TreeHyper tree;
    ForestHyper forest;
    LogisticHyper logistic;
    BoostHyper boost;
};

Model fit(const LearnerConfig& config, const Matrix& X, const LabelVector& y, std::uint64_t seed);

}  // namespace fsnull
