#include <algorithm>
#include <cmath>
#include <numeric>

#include "common.hpp"
#include "fsnull/random.hpp"

namespace fsnull {

std::size_t FeatureRule::resolve(std::size_t n_features) const {
    switch (kind) {
        case Kind::All:
            return n_features;
        case Kind::Sqrt:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));
        case Kind::Fixed:
            if (count < 1 || count > n_features) {
                throw Error(ErrorCode::InvalidArgument,
                            "fixed feature rule needs 1 <= m <= " + std::to_string(n_features));
            }
            return count;
    }
    return n_features;
}

TreeModel::TreeModel(std::vector<TreeNode> nodes, std::vector<double> values,
                     std::size_t class_count, std::size_t feature_count)
    : nodes_(std::move(nodes)),
      values_(std::move(values)),
      class_count_(class_count),
      feature_count_(feature_count) {}

std::span<const double> TreeModel::leaf_for(std::span<const double> row) const {
    std::size_t at = 0;
    while (nodes_[at].feature >= 0) {
        const auto& node = nodes_[at];
        at = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold
                                          ? node.left
                                          : node.right);
    }
    return {values_.data() + nodes_[at].value_offset, class_count_};
}

ProbabilityMatrix TreeModel::predict_proba(const Matrix& X) const {
    detail::check_predict_shape(feature_count_, X);
    ProbabilityMatrix out(X.rows(), class_count_);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const auto leaf = leaf_for(X.row(i));
        std::copy(leaf.begin(), leaf.end(), out.row(i).begin());
    }
    return out;
}

std::size_t TreeModel::depth() const {
    std::vector<std::size_t> depth(nodes_.size(), 0);
    std::size_t deepest = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        deepest = std::max(deepest, depth[i]);
        if (nodes_[i].feature >= 0) {
            depth[static_cast<std::size_t>(nodes_[i].left)] = depth[i] + 1;
            depth[static_cast<std::size_t>(nodes_[i].right)] = depth[i] + 1;
        }
    }
    return deepest;
}

std::size_t TreeModel::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

double gini_impurity(std::span<const std::size_t> class_counts) noexcept {
    double total = 0.0;
    for (const auto c : class_counts) total += static_cast<double>(c);
    if (total == 0.0) return 0.0;
    double sum_sq = 0.0;
    for (const auto c : class_counts) sum_sq += (static_cast<double>(c) / total) * (static_cast<double>(c) / total);
    return 1.0 - sum_sq;
}

namespace {

struct Split {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double score = 0.0;  // sum_c L_c^2 / n_L + sum_c R_c^2 / n_R; larger is purer
};

bool better(const Split& candidate, const Split& best) {
    if (!best.found) return true;
    if (candidate.score != best.score) return candidate.score > best.score;
    if (candidate.feature != best.feature) return candidate.feature < best.feature;
    return candidate.threshold < best.threshold;
}

double midpoint(double a, double b) {
    const double mid = a + (b - a) / 2.0;
    return mid < b ? mid : a;
}

class ClassificationTreeBuilder {
public:
    ClassificationTreeBuilder(const Matrix& X, const std::vector<int>& y, std::size_t k,
                              const TreeHyper& hyper, std::uint64_t seed)
        : X_(X),
          y_(y),
          k_(k),
          hyper_(hyper),
          mtry_(hyper.max_features.resolve(X.cols())),
          rng_(seed),
          pool_(X.cols()) {
        std::iota(pool_.begin(), pool_.end(), std::size_t{0});
    }

    TreeModel build(std::vector<std::size_t> samples) {
        struct Pending {
            std::size_t node;
            std::size_t depth;
            std::vector<std::size_t> samples;
        };
        nodes_.clear();
        values_.clear();
        nodes_.emplace_back();
        std::vector<Pending> stack;
        stack.push_back({0, 0, std::move(samples)});

        while (!stack.empty()) {
            Pending job = std::move(stack.back());
            stack.pop_back();

            const auto counts = class_counts(job.samples);
            const bool pure = std::count_if(counts.begin(), counts.end(),
                                            [](std::size_t c) { return c > 0; }) <= 1;
            const bool depth_ok = !hyper_.max_depth || job.depth < *hyper_.max_depth;
            Split split;
            if (!pure && depth_ok && job.samples.size() >= hyper_.min_samples_split) {
                split = find_split(job.samples, counts);
            }
            if (!split.found) {
                make_leaf(job.node, counts, job.samples.size());
                continue;
            }

            std::vector<std::size_t> left, right;
            for (const auto s : job.samples) {
                (X_(s, split.feature) <= split.threshold ? left : right).push_back(s);
            }
            const auto left_id = static_cast<int>(nodes_.size());
            nodes_.emplace_back();
            nodes_.emplace_back();
            auto& node = nodes_[job.node];
            node.feature = static_cast<int>(split.feature);
            node.threshold = split.threshold;
            node.left = left_id;
            node.right = left_id + 1;
            // Right is pushed first so the left subtree is grown first.
            stack.push_back({static_cast<std::size_t>(left_id + 1), job.depth + 1, std::move(right)});
            stack.push_back({static_cast<std::size_t>(left_id), job.depth + 1, std::move(left)});
        }
        return TreeModel(std::move(nodes_), std::move(values_), k_, X_.cols());
    }

private:
    std::vector<std::size_t> class_counts(const std::vector<std::size_t>& samples) const {
        std::vector<std::size_t> counts(k_, 0);
        for (const auto s : samples) ++counts[static_cast<std::size_t>(y_[s])];
        return counts;
    }

    void make_leaf(std::size_t node, const std::vector<std::size_t>& counts, std::size_t total) {
        nodes_[node].feature = -1;
        nodes_[node].value_offset = values_.size();
        for (const auto c : counts) {
            values_.push_back(static_cast<double>(c) / static_cast<double>(total));
        }
    }

    Split find_split(const std::vector<std::size_t>& samples, const std::vector<std::size_t>& counts) {
        const std::size_t m = X_.cols();
        Split best;
        if (mtry_ >= m) {
            for (std::size_t f = 0; f < m; ++f) evaluate(f, samples, counts, best);
            return best;
        }
        // Features are drawn without replacement until at least mtry have
        // been inspected and a valid split exists.
        for (std::size_t i = 0; i < m && (i < mtry_ || !best.found); ++i) {
            const auto j = i + static_cast<std::size_t>(rng_.uniform_index(m - i));
            std::swap(pool_[i], pool_[j]);
            evaluate(pool_[i], samples, counts, best);
        }
        return best;
    }

    void evaluate(std::size_t feature, const std::vector<std::size_t>& samples,
                  const std::vector<std::size_t>& counts, Split& best) {
        buffer_.clear();
        for (const auto s : samples) buffer_.push_back({X_(s, feature), y_[s]});
        std::sort(buffer_.begin(), buffer_.end(), [](const Entry& a, const Entry& b) {
            return a.value < b.value || (a.value == b.value && a.label < b.label);
        });
        if (buffer_.front().value == buffer_.back().value) return;

        left_.assign(k_, 0);
        right_.assign(counts.begin(), counts.end());
        std::int64_t left_sq = 0;
        std::int64_t right_sq = 0;
        for (const auto c : counts) right_sq += static_cast<std::int64_t>(c * c);

        const std::size_t n = buffer_.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const auto c = static_cast<std::size_t>(buffer_[i].label);
            left_sq += 2 * static_cast<std::int64_t>(left_[c]) + 1;
            right_sq -= 2 * static_cast<std::int64_t>(right_[c]) - 1;
            ++left_[c];
            --right_[c];
            if (buffer_[i].value == buffer_[i + 1].value) continue;
            const double n_left = static_cast<double>(i + 1);
            const double n_right = static_cast<double>(n - i - 1);
            Split candidate{true, feature, midpoint(buffer_[i].value, buffer_[i + 1].value),
                            static_cast<double>(left_sq) / n_left +
                                static_cast<double>(right_sq) / n_right};
            if (better(candidate, best)) best = candidate;
        }
    }

    struct Entry {
        double value;
        int label;
    };

    const Matrix& X_;
    const std::vector<int>& y_;
    std::size_t k_;
    TreeHyper hyper_;
    std::size_t mtry_;
    Xoshiro256 rng_;
    std::vector<std::size_t> pool_;
    std::vector<Entry> buffer_;
    std::vector<std::size_t> left_, right_;
    std::vector<TreeNode> nodes_;
    std::vector<double> values_;
};

TreeModel grow_tree(const Matrix& X, const LabelVector& y, const TreeHyper& hyper,
                    std::uint64_t seed, bool bootstrap) {
    if (hyper.min_samples_split < 2) {
        throw Error(ErrorCode::InvalidArgument, "min_samples_split must be at least 2");
    }
    ClassificationTreeBuilder builder(X, y.labels, y.class_count(), hyper, seed);
    std::vector<std::size_t> samples(X.rows());
    if (bootstrap) {
        // Drawn from a stream separate from the split-feature draws.
        Xoshiro256 rng(child_seed(seed, 0x626f6f74ULL));
        for (auto& s : samples) s = static_cast<std::size_t>(rng.uniform_index(X.rows()));
    } else {
        std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    return builder.build(std::move(samples));
}

}  // namespace

TreeModel fit_tree(const Matrix& X, const LabelVector& y, const TreeHyper& hyper,
                   std::uint64_t seed) {
    detail::check_training_input(X, y, "decision tree");
    return grow_tree(X, y, hyper, seed, false);
}

std::uint64_t forest_tree_seed(std::uint64_t seed, std::size_t t) noexcept {
    return child_seed(seed, t);
}

ForestModel::ForestModel(std::vector<TreeModel> trees) : trees_(std::move(trees)) {
    if (trees_.empty()) throw Error(ErrorCode::InvalidArgument, "a forest needs at least one tree");
}

ProbabilityMatrix ForestModel::predict_proba(const Matrix& X) const {
    detail::check_predict_shape(feature_count(), X);
    const std::size_t k = class_count();
    ProbabilityMatrix out(X.rows(), k, 0.0);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        auto dst = out.row(i);
        for (const auto& tree : trees_) {
            const auto leaf = tree.leaf_for(X.row(i));
            for (std::size_t c = 0; c < k; ++c) dst[c] += leaf[c];
        }
        for (auto& v : dst) v /= static_cast<double>(trees_.size());
    }
    return out;
}

ForestModel fit_forest(const Matrix& X, const LabelVector& y, const ForestHyper& hyper,
                       std::uint64_t seed) {
    detail::check_training_input(X, y, "random forest");
    if (hyper.n_trees < 1) throw Error(ErrorCode::InvalidArgument, "n_trees must be at least 1");
    std::vector<TreeModel> trees;
    trees.reserve(hyper.n_trees);
    for (std::size_t t = 0; t < hyper.n_trees; ++t) {
        trees.push_back(grow_tree(X, y, hyper.tree, forest_tree_seed(seed, t), hyper.bootstrap));
    }
    return ForestModel(std::move(trees));
}

}  // namespace fsnull
