#pragma once

#include <cstddef>
#include <vector>

#include "fsnull/data.hpp"
#include "fsnull/learners.hpp"
#include "fsnull/sampling.hpp"

namespace fsnull {

struct EnsembleSpec {
    std::vector<LearnerKind> families{LearnerKind::Logistic, LearnerKind::Forest,
                                      LearnerKind::Boosted};
    std::size_t variants_per_family = 3;
    std::size_t subset_size = 1;
    /// Each member draws its own feature subset; otherwise all share one.
    bool independent_subsets = true;

    std::size_t member_count() const noexcept { return families.size() * variants_per_family; }
};

struct EnsembleMember {
    LearnerKind kind;
    FeatureSubset subset;
    Model model;
};

/// Soft-voting ensemble: the prediction is the unweighted mean of the
/// members' probability matrices.
class EnsembleModel {
public:
    explicit EnsembleModel(std::vector<EnsembleMember> members);

    const std::vector<EnsembleMember>& members() const noexcept { return members_; }

    /// `X` carries all features; each member reads its own columns.
    ProbabilityMatrix predict_proba(const Matrix& X) const;

private:
    std::vector<EnsembleMember> members_;
};

/// Hyperparameters given to variant `v` of `family`. Variants cycle through
/// three settings: forest n_trees {100, 200, 300}, logistic l2 {0.01, 0.1, 1},
/// boosting rounds {50, 100, 150}. `base` supplies everything else.
LearnerConfig ensemble_variant_config(LearnerKind family, std::size_t variant,
                                      const LearnerConfig& base = {});

/// Member i (family-major order) samples its subset with
/// derive_seed(ctx, subset_size, i) and trains with a seed derived from the
/// same cell under the tag "<mode_tag>/model".
EnsembleModel fit_ensemble(const Dataset& train, const EnsembleSpec& spec, const SeedContext& ctx,
                           const LearnerConfig& base = {});

/// Row-wise mean of equally shaped probability matrices.
ProbabilityMatrix average_probabilities(const std::vector<ProbabilityMatrix>& members);

}  // namespace fsnull
