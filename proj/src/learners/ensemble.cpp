#include "fsnull/ensemble.hpp"

#include <array>

#include "common.hpp"

namespace fsnull {

EnsembleModel::EnsembleModel(std::vector<EnsembleMember> members) : members_(std::move(members)) {
    if (members_.empty()) throw Error(ErrorCode::InvalidArgument, "an ensemble needs a member");
}

ProbabilityMatrix average_probabilities(const std::vector<ProbabilityMatrix>& members) {
    if (members.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to average");
    ProbabilityMatrix out(members.front().rows(), members.front().cols(), 0.0);
    for (const auto& m : members) {
        if (m.rows() != out.rows() || m.cols() != out.cols()) {
            throw Error(ErrorCode::ShapeMismatch, "member probability matrices differ in shape");
        }
        auto dst = out.data();
        const auto src = m.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    if (members.size() > 1) {
        for (auto& v : out.data()) v /= static_cast<double>(members.size());
    }
    return out;
}

ProbabilityMatrix EnsembleModel::predict_proba(const Matrix& X) const {
    std::vector<ProbabilityMatrix> outputs;
    outputs.reserve(members_.size());
    for (const auto& member : members_) {
        if (!member.subset.indices.empty() && member.subset.indices.back() >= X.cols()) {
            throw Error(ErrorCode::ShapeMismatch, "ensemble input lacks the members' feature columns");
        }
        outputs.push_back(fsnull::predict_proba(member.model, select_columns(X, member.subset.indices)));
    }
    return average_probabilities(outputs);
}

LearnerConfig ensemble_variant_config(LearnerKind family, std::size_t variant,
                                      const LearnerConfig& base) {
    static constexpr std::array<std::size_t, 3> kTrees{100, 200, 300};
    static constexpr std::array<double, 3> kLambda{0.01, 0.1, 1.0};
    static constexpr std::array<std::size_t, 3> kRounds{50, 100, 150};
    LearnerConfig config = base;
    config.kind = family;
    const std::size_t v = variant % 3;
    config.forest.n_trees = kTrees[v];
    config.logistic.l2_lambda = kLambda[v];
    config.boost.n_rounds = kRounds[v];
    return config;
}

EnsembleModel fit_ensemble(const Dataset& train, const EnsembleSpec& spec, const SeedContext& ctx,
                           const LearnerConfig& base) {
    const std::size_t p = train.n_features();
    if (spec.subset_size < 1 || spec.subset_size > p) {
        throw Error(ErrorCode::SizeExceedsFeatures, "ensemble subset size " +
                                                        std::to_string(spec.subset_size) +
                                                        " exceeds " + std::to_string(p) + " features");
    }
    if (spec.member_count() == 0) throw Error(ErrorCode::InvalidArgument, "ensemble has no members");

    const SeedContext model_ctx{ctx.master_seed, ctx.mode_tag + "/model"};
    std::vector<EnsembleMember> members;
    members.reserve(spec.member_count());
    std::size_t index = 0;
    for (const auto family : spec.families) {
        for (std::size_t v = 0; v < spec.variants_per_family; ++v, ++index) {
            const std::size_t subset_cell = spec.independent_subsets ? index : 0;
            auto subset = sample_subset(p, spec.subset_size,
                                        derive_seed(ctx, spec.subset_size, subset_cell));
            const Matrix X = select_columns(train.matrix.values(), subset.indices);
            Model model = fit(ensemble_variant_config(family, v, base), X, train.labels,
                              derive_seed(model_ctx, spec.subset_size, index));
            members.push_back({family, std::move(subset), std::move(model)});
        }
    }
    return EnsembleModel(std::move(members));
}

}  // namespace fsnull
