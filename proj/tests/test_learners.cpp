#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fsnull/ensemble.hpp"
#include "fsnull/error.hpp"
#include "fsnull/learners.hpp"
#include "fsnull/metrics.hpp"
#include "test_support.hpp"

using namespace fsnull;

namespace {

LabelVector labels_of(std::vector<int> y, std::size_t k = 2) {
    std::vector<std::string> names;
    for (std::size_t c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
    return LabelVector{std::move(y), std::move(names)};
}

const Matrix kXorX(4, 2, {0, 0, 0, 1, 1, 0, 1, 1});
const LabelVector kXorY = labels_of({0, 1, 1, 0});

double train_accuracy(const Model& m, const Matrix& X, const LabelVector& y) {
    return accuracy(y, predict_proba(m, X));
}

void check_row_stochastic(const ProbabilityMatrix& p) {
    for (std::size_t i = 0; i < p.rows(); ++i) {
        double s = 0.0;
        for (const double v : p.row(i)) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
            s += v;
        }
        CHECK(std::abs(s - 1.0) < 1e-9);
    }
}

Dataset three_class_blobs(std::size_t n, std::uint32_t seed) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix x(n, 3);
    std::vector<std::string> raw(n), ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % 3;
        for (std::size_t j = 0; j < 3; ++j) x(i, j) = (j == c ? 3.0 : 0.0) + nd(gen);
        raw[i] = "k" + std::to_string(c);
        ids[i] = std::to_string(i);
    }
    return Dataset(DataMatrix(std::move(x), {"a", "b", "c"}, ids), LabelVector::from_strings(raw));
}

std::vector<LearnerConfig> all_learners() {
    std::vector<LearnerConfig> out;
    for (auto kind : {LearnerKind::Tree, LearnerKind::Forest, LearnerKind::Logistic, LearnerKind::Boosted}) {
        LearnerConfig c;
        c.kind = kind;
        c.forest.n_trees = 15;
        c.boost.n_rounds = 20;
        out.push_back(c);
    }
    return out;
}

}  // namespace

TEST_CASE("gini impurity") {
    const std::size_t balanced[] = {5, 5};
    const std::size_t pure[] = {0, 7};
    const std::size_t three[] = {1, 1, 1};
    CHECK(gini_impurity(balanced) == 0.5);
    CHECK(gini_impurity(pure) == 0.0);
    CHECK(gini_impurity(three) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("learner names parse") {
    CHECK(parse_learner_kind("rf") == LearnerKind::Forest);
    CHECK(parse_learner_kind("dt") == LearnerKind::Tree);
    CHECK(parse_learner_kind("lr") == LearnerKind::Logistic);
    CHECK(parse_learner_kind("gbm") == LearnerKind::Boosted);
    CHECK_FALSE(parse_learner_kind("svm").has_value());
    CHECK(FeatureRule::sqrt().resolve(2000) == 44);
    CHECK(FeatureRule::sqrt().resolve(1) == 1);
}

TEST_CASE("tree separates a 1-D pair with one split") {
    const Matrix X(2, 1, {0, 1});
    const auto t = fit_tree(X, labels_of({0, 1}), {}, 1);
    CHECK(t.depth() == 1);
    CHECK(t.leaf_count() == 2);
    CHECK(t.nodes()[0].threshold == 0.5);
    CHECK(accuracy(labels_of({0, 1}), t.predict_proba(X)) == 1.0);
}

TEST_CASE("tree fits XOR with unlimited depth") {
    const auto t = fit_tree(kXorX, kXorY, {}, 3);
    CHECK(accuracy(kXorY, t.predict_proba(kXorX)) == 1.0);
    CHECK(t.depth() == 2);
}

TEST_CASE("single-leaf tree predicts class frequencies") {
    const Matrix X(4, 1, {1, 2, 3, 4});
    TreeHyper h;
    h.max_depth = 0;
    const auto t = fit_tree(X, labels_of({0, 0, 1, 0}), h, 0);
    const auto p = t.predict_proba(Matrix(3, 1, {-5, 2.5, 100}));
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(p(i, 0) == 0.75);
        CHECK(p(i, 1) == 0.25);
    }
}

TEST_CASE("split ties go to the lowest feature then the lowest threshold") {
    // Features 0 and 1 are identical, so every split scores the same on both.
    const Matrix X(4, 2, {0, 0, 1, 1, 2, 2, 3, 3});
    const auto t = fit_tree(X, labels_of({0, 1, 1, 0}), {std::size_t{1}, 2, FeatureRule::all()}, 0);
    CHECK(t.nodes()[0].feature == 0);
    CHECK(t.nodes()[0].threshold == 0.5);
}

TEST_CASE("forest with one tree and no bootstrap equals fit_tree") {
    const auto ds = fsnull::testing::blobs(60, 8, 0.5, 4);
    ForestHyper fh;
    fh.n_trees = 1;
    fh.bootstrap = false;
    const std::uint64_t seed = 1234;
    const auto forest = fit_forest(ds.matrix.values(), ds.labels, fh, seed);
    const auto tree = fit_tree(ds.matrix.values(), ds.labels, fh.tree, forest_tree_seed(seed, 0));
    CHECK(forest.trees().front() == tree);
    CHECK(forest.predict_proba(ds.matrix.values()) == tree.predict_proba(ds.matrix.values()));
}

TEST_CASE("forest of identical stumps equals the stump") {
    const auto ds = fsnull::testing::blobs(40, 3, 1.0, 8);
    ForestHyper fh;
    fh.n_trees = 7;
    fh.bootstrap = false;
    fh.tree = TreeHyper{std::size_t{1}, 2, FeatureRule::all()};
    const auto forest = fit_forest(ds.matrix.values(), ds.labels, fh, 5);
    const auto stump = fit_tree(ds.matrix.values(), ds.labels, fh.tree, 0);
    const auto pf = forest.predict_proba(ds.matrix.values());
    const auto ps = stump.predict_proba(ds.matrix.values());
    for (std::size_t i = 0; i < pf.data().size(); ++i) CHECK(std::abs(pf.data()[i] - ps.data()[i]) < 1e-12);
}

TEST_CASE("forest separates well-separated blobs") {
    std::mt19937 gen(21);
    std::normal_distribution<double> nd(0.0, 1.0);
    Matrix x(100, 2);
    std::vector<std::string> raw(100), ids(100);
    for (std::size_t i = 0; i < 100; ++i) {
        const double mu = i % 2 ? 3.0 : -3.0;
        x(i, 0) = mu + nd(gen);
        x(i, 1) = mu + nd(gen);
        raw[i] = i % 2 ? "pos" : "neg";
        ids[i] = std::to_string(i);
    }
    const Dataset ds(DataMatrix(x, {"u", "v"}, ids), LabelVector::from_strings(raw));
    const auto split = stratified_split(ds, 0.2, 3);
    const auto forest = fit_forest(split.train.matrix.values(), split.train.labels, {}, 11);
    CHECK(accuracy(split.test.labels, forest.predict_proba(split.test.matrix.values())) >= 0.95);
}

TEST_CASE("every learner is deterministic and row-stochastic") {
    const auto ds = three_class_blobs(60, 2);
    for (const auto& cfg : all_learners()) {
        CAPTURE(to_string(cfg.kind));
        const auto a = fit(cfg, ds.matrix.values(), ds.labels, 77);
        const auto b = fit(cfg, ds.matrix.values(), ds.labels, 77);
        CHECK(a == b);
        const auto pa = predict_proba(a, ds.matrix.values());
        CHECK(pa == predict_proba(b, ds.matrix.values()));
        CHECK(pa.cols() == 3);
        check_row_stochastic(pa);
        CHECK(train_accuracy(a, ds.matrix.values(), ds.labels) > 0.8);
        CHECK_THROWS_AS(predict_proba(a, Matrix(2, 4)), Error);
    }
}

TEST_CASE("tree is invariant to training-row order without bootstrap") {
    const auto ds = three_class_blobs(45, 9);
    std::vector<std::size_t> perm(ds.n_samples());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937 gen(1);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(perm.begin(), perm.end(), gen);
        const auto shuffled = ds.select_samples(perm);
        const auto t1 = fit_tree(ds.matrix.values(), ds.labels, {}, 5);
        const auto t2 = fit_tree(shuffled.matrix.values(), shuffled.labels, {}, 5);
        CHECK(t1 == t2);
    }
}

TEST_CASE("training input is validated") {
    CHECK_THROWS_AS(fit_tree(Matrix(0, 2), labels_of({}), {}, 0), Error);
    CHECK_THROWS_AS(fit_tree(Matrix(3, 2), labels_of({0, 1}), {}, 0), Error);
    CHECK_THROWS_AS(fit_boosted(Matrix(3, 1, {1, 2, 3}), labels_of({1, 1, 1}), {}, 0), Error);
}

TEST_CASE("logistic with zero weights predicts 1/k") {
    for (std::size_t k : {2, 3, 7}) {
        const LogisticModel m(Matrix(k, 4, 0.0), 0);
        const auto p = m.predict_proba(Matrix(2, 3, {1, -2, 3, 4, 5, -6}));
        for (const double v : p.data()) CHECK(v == 1.0 / static_cast<double>(k));
    }
}

TEST_CASE("logistic gradient matches central differences") {
    std::mt19937_64 gen(31);
    std::normal_distribution<double> nd(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 2 + trial % 3;
        Matrix X(5, 3);
        for (auto& v : X.data()) v = nd(gen);
        std::vector<int> y(5);
        for (auto& v : y) v = static_cast<int>(gen() % k);
        Matrix W(k, 4);
        for (auto& v : W.data()) v = nd(gen);
        const double l2 = 0.1 * static_cast<double>(trial % 4);
        Matrix grad;
        logistic_objective(X, y, W, l2, &grad);
        const double h = 1e-5;
        for (std::size_t i = 0; i < W.data().size(); ++i) {
            Matrix plus = W, minus = W;
            plus.data()[i] += h;
            minus.data()[i] -= h;
            const double fd = (logistic_objective(X, y, plus, l2, nullptr) -
                               logistic_objective(X, y, minus, l2, nullptr)) / (2 * h);
            worst = std::max(worst, std::abs(fd - grad.data()[i]));
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("logistic separates a 1-D pair") {
    const Matrix X(2, 1, {-1, 1});
    LogisticHyper h;
    h.l2_lambda = 0.0;
    const auto m = fit_logistic(X, labels_of({0, 1}), h, 0);
    CHECK(accuracy(labels_of({0, 1}), m.predict_proba(X)) == 1.0);
}

TEST_CASE("boosting loss never increases") {
    const auto ds = fsnull::testing::blobs(80, 5, 0.4, 12);
    for (double lr : {0.1, 0.5, 1.0}) {
        BoostHyper h;
        h.learning_rate = lr;
        h.n_rounds = 40;
        const auto m = fit_boosted(ds.matrix.values(), ds.labels, h, 0);
        const auto& loss = m.loss_history();
        REQUIRE(loss.size() == 41);
        for (std::size_t r = 1; r < loss.size(); ++r) CHECK(loss[r] <= loss[r - 1] + 1e-12);
    }
    const auto multi = three_class_blobs(60, 4);
    const auto m = fit_boosted(multi.matrix.values(), multi.labels, {}, 0);
    for (std::size_t r = 1; r < m.loss_history().size(); ++r) {
        CHECK(m.loss_history()[r] <= m.loss_history()[r - 1] + 1e-12);
    }
}

TEST_CASE("boosting fits XOR at depth 2") {
    BoostHyper h;
    h.tree_depth = 2;
    h.n_rounds = 50;
    const auto m = fit_boosted(kXorX, kXorY, h, 0);
    CHECK(accuracy(kXorY, m.predict_proba(kXorX)) == 1.0);
}

TEST_CASE("ensemble composition and soft vote") {
    const auto ds = three_class_blobs(45, 6);
    const auto ens = fit_ensemble(ds, EnsembleSpec{}, {42, "ensemble"});
    CHECK(EnsembleSpec{}.member_count() == 9);
    REQUIRE(ens.members().size() == 9);
    for (std::size_t i = 0; i < 9; ++i) {
        CHECK(ens.members()[i].subset.size() == 1);
        CHECK(ens.members()[i].subset.seed == derive_seed({42, "ensemble"}, 1, i));
    }
    CHECK(ens.members()[0].kind == LearnerKind::Logistic);
    CHECK(ens.members()[3].kind == LearnerKind::Forest);
    CHECK(ens.members()[8].kind == LearnerKind::Boosted);
    check_row_stochastic(ens.predict_proba(ds.matrix.values()));

    CHECK(ensemble_variant_config(LearnerKind::Forest, 2).forest.n_trees == 300);
    CHECK(ensemble_variant_config(LearnerKind::Logistic, 1).logistic.l2_lambda == 0.1);
    CHECK(ensemble_variant_config(LearnerKind::Boosted, 0).boost.n_rounds == 50);

    EnsembleSpec single;
    single.families = {LearnerKind::Tree};
    single.variants_per_family = 1;
    single.subset_size = 2;
    const auto one = fit_ensemble(ds, single, {1, "x"});
    REQUIRE(one.members().size() == 1);
    const auto& member = one.members().front();
    const auto cols = select_columns(ds.matrix.values(), member.subset.indices);
    CHECK(one.predict_proba(ds.matrix.values()) == predict_proba(member.model, cols));

    const auto avg = average_probabilities({Matrix(1, 2, {1, 0}), Matrix(1, 2, {0, 1})});
    CHECK(avg == Matrix(1, 2, {0.5, 0.5}));

    single.subset_size = 4;
    CHECK_THROWS_AS(fit_ensemble(ds, single, {1, "x"}), Error);
}
