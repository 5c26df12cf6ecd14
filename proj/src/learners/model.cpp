#include "common.hpp"

namespace fsnull {

std::string_view to_string(LearnerKind kind) noexcept {
    switch (kind) {
        case LearnerKind::Tree: return "dt";
        case LearnerKind::Forest: return "rf";
        case LearnerKind::Logistic: return "lr";
        case LearnerKind::Boosted: return "gbm";
    }
    return "?";
}

std::optional<LearnerKind> parse_learner_kind(std::string_view name) noexcept {
    if (name == "dt" || name == "tree") return LearnerKind::Tree;
    if (name == "rf" || name == "forest") return LearnerKind::Forest;
    if (name == "lr" || name == "logistic") return LearnerKind::Logistic;
    if (name == "gbm" || name == "boosted") return LearnerKind::Boosted;
    return std::nullopt;
}

std::size_t Model::class_count() const {
    return std::visit([](const auto& m) { return m.class_count(); }, impl_);
}

std::size_t Model::feature_count() const {
    return std::visit([](const auto& m) { return m.feature_count(); }, impl_);
}

ProbabilityMatrix predict_proba(const Model& model, const Matrix& X) {
    return std::visit([&](const auto& m) { return m.predict_proba(X); }, model.variant());
}

Model fit(const LearnerConfig& config, const Matrix& X, const LabelVector& y, std::uint64_t seed) {
    switch (config.kind) {
        case LearnerKind::Tree: return fit_tree(X, y, config.tree, seed);
        case LearnerKind::Forest: return fit_forest(X, y, config.forest, seed);
        case LearnerKind::Logistic: return fit_logistic(X, y, config.logistic, seed);
        case LearnerKind::Boosted: return fit_boosted(X, y, config.boost, seed);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown learner kind");
}

}  // namespace fsnull
