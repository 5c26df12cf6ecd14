#include "fsnull/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "fsnull/ensemble.hpp"
#include "fsnull/error.hpp"
#include "fsnull/parallel.hpp"
#include "fsnull/sampling.hpp"

namespace fsnull {

std::string_view to_string(VerdictMetric metric) noexcept {
    return metric == VerdictMetric::Auc ? "auc" : "accuracy";
}

std::optional<VerdictMetric> parse_verdict_metric(std::string_view text) noexcept {
    if (text == "auc") return VerdictMetric::Auc;
    if (text == "accuracy") return VerdictMetric::Accuracy;
    return std::nullopt;
}

std::string_view to_string(VerdictLevel level) noexcept {
    switch (level) {
        case VerdictLevel::No: return "No";
        case VerdictLevel::Within5: return "Within5";
        case VerdictLevel::Within2: return "Within2";
        case VerdictLevel::Yes: return "Yes";
        case VerdictLevel::Surpasses: return "Surpasses";
    }
    return "?";
}

std::optional<VerdictLevel> parse_verdict_level(std::string_view text) noexcept {
    for (const auto level : {VerdictLevel::No, VerdictLevel::Within5, VerdictLevel::Within2,
                             VerdictLevel::Yes, VerdictLevel::Surpasses}) {
        if (text == to_string(level)) return level;
    }
    return std::nullopt;
}

void ExperimentConfig::validate() const {
    if (n_runs < 1) throw Error(ErrorCode::InvalidArgument, "at least one run is required");
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
    }
    const auto& t = tolerances;
    if (!(0.0 < t.within2 && t.within2 < t.within5 && t.within5 < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerances need 0 < within2 < within5 < 1");
    }
    if (t.surpass_delta < 0.0 || t.within_full < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "tolerances must be non-negative");
    }
}

Verdict compute_verdict(std::span<const SummaryRecord> summaries, double full_value,
                        VerdictMetric metric, const Tolerances& tolerances) {
    if (summaries.empty()) throw Error(ErrorCode::EmptySummaries, "no summaries to judge");
    const SummaryRecord* best = nullptr;
    auto value_of = [metric](const SummaryRecord& s) {
        return metric == VerdictMetric::Auc ? s.mean_auc : s.mean_accuracy;
    };
    for (const auto& s : summaries) {
        if (!best || value_of(s) > value_of(*best) ||
            (value_of(s) == value_of(*best) && s.subset_size < best->subset_size)) {
            best = &s;
        }
    }
    Verdict v;
    v.best_size = best->subset_size;
    v.best_mean = value_of(*best);
    v.full_value = full_value;
    const double m = v.best_mean;
    if (m > full_value + tolerances.surpass_delta) {
        v.level = VerdictLevel::Surpasses;
    } else if (m >= full_value - tolerances.within_full) {
        v.level = VerdictLevel::Yes;
    } else if (m >= full_value * (1.0 - tolerances.within2)) {
        v.level = VerdictLevel::Within2;
    } else if (m >= full_value * (1.0 - tolerances.within5)) {
        v.level = VerdictLevel::Within5;
    } else {
        v.level = VerdictLevel::No;
    }
    return v;
}

namespace {

void log_line(const ExperimentConfig& config, const std::string& line) {
    if (config.log) config.log(line);
}

ColumnScore evaluate(const ProbabilityMatrix& proba, const LabelVector& truth) {
    return {accuracy(truth, proba), auc_multiclass(truth, proba)};
}

ColumnScore fit_and_score(const LearnerConfig& learner, const Matrix& X_train, const Matrix& X_test,
                          const Dataset& train, const Dataset& test, std::uint64_t seed) {
    const Model model = fit(learner, X_train, train.labels, seed);
    return evaluate(predict_proba(model, X_test), test.labels);
}

std::uint64_t split_seed(std::uint64_t master) {
    return derive_seed({master, "split"}, 0, 0);
}

std::uint64_t full_model_seed(std::uint64_t master, std::size_t p) {
    return derive_seed({master, "full"}, p, 0);
}

struct PreparedSplit {
    Dataset train;
    Dataset test;
};

PreparedSplit standardize_pair(const Dataset& train, const Dataset& test) {
    auto z = standardize(train.matrix, {test.matrix});
    return {Dataset(std::move(z.train), train.labels), Dataset(std::move(z.others.front()), test.labels)};
}

// Random-subset models for every (size, run) cell, in record order.
std::vector<RunRecord> random_subset_runs(const PreparedSplit& data, std::span<const std::size_t> sizes,
                                          const ExperimentConfig& config) {
    const std::size_t p = data.train.n_features();
    const std::size_t n_runs = config.n_runs;
    const SeedContext subset_ctx{config.master_seed, "random"};
    const SeedContext model_ctx{config.master_seed, "random/model"};
    std::vector<RunRecord> records(sizes.size() * n_runs);
    parallel_for(records.size(), config.threads, [&](std::size_t task) {
        const std::size_t size = sizes[task / n_runs];
        const std::size_t run = task % n_runs;
        const auto subset = sample_subset(p, size, derive_seed(subset_ctx, size, run));
        const Matrix X_train = select_columns(data.train.matrix.values(), subset.indices);
        const Matrix X_test = select_columns(data.test.matrix.values(), subset.indices);
        const auto score = fit_and_score(config.learner, X_train, X_test, data.train, data.test,
                                         derive_seed(model_ctx, size, run));
        records[task] = {RunMode::Random, size, run, subset.seed, score.accuracy, score.auc};
    });
    return records;
}

GridResult run_grid(const PreparedSplit& data, const ExperimentConfig& config) {
    GridResult result;
    result.metric = config.metric;
    result.p = data.train.n_features();
    result.n_runs = config.n_runs;

    log_line(config, "full-feature baseline on " + std::to_string(result.p) + " features");
    const std::uint64_t full_seed = full_model_seed(config.master_seed, result.p);
    const auto full = fit_and_score(config.learner, data.train.matrix.values(),
                                    data.test.matrix.values(), data.train, data.test, full_seed);
    result.full_accuracy = full.accuracy;
    result.full_auc = full.auc;

    const auto schedule = build_schedule(result.p);
    log_line(config, "random subsets: " + std::to_string(schedule.sizes.size()) + " sizes x " +
                         std::to_string(config.n_runs) + " runs");
    result.runs = random_subset_runs(data, schedule.sizes, config);
    result.summaries = summarize(result.runs);
    result.runs.push_back({RunMode::Full, result.p, 0, full_seed, full.accuracy, full.auc});
    std::sort(result.runs.begin(), result.runs.end(), record_order);

    result.verdict = compute_verdict(result.summaries, result.full_value(), config.metric,
                                     config.tolerances);
    log_line(config, "verdict: " + std::string(to_string(result.verdict.level)));
    return result;
}

// Re-expresses `test` labels in the class order of `train`.
LabelVector relabel(const LabelVector& test, const LabelVector& train) {
    if (test.class_names == train.class_names) return test;
    std::unordered_map<std::string, int> index;
    for (std::size_t c = 0; c < train.class_names.size(); ++c) {
        index.emplace(train.class_names[c], static_cast<int>(c));
    }
    LabelVector out;
    out.class_names = train.class_names;
    out.labels.reserve(test.size());
    for (const int l : test.labels) {
        const auto& name = test.class_names[static_cast<std::size_t>(l)];
        const auto it = index.find(name);
        if (it == index.end()) {
            throw Error(ErrorCode::InvalidArgument,
                        "test class '" + name + "' does not occur in the training dataset");
        }
        out.labels.push_back(it->second);
    }
    return out;
}

}  // namespace

GridResult run_intra(const Dataset& dataset, const ExperimentConfig& config) {
    config.validate();
    log_line(config, "stratified split of " + std::to_string(dataset.n_samples()) + " samples");
    const auto split = stratified_split(dataset, config.test_fraction, split_seed(config.master_seed));
    return run_grid(standardize_pair(split.train, split.test), config);
}

ColumnScore score_full_features(const Dataset& dataset, const ExperimentConfig& config) {
    config.validate();
    const auto split = stratified_split(dataset, config.test_fraction, split_seed(config.master_seed));
    const auto data = standardize_pair(split.train, split.test);
    return fit_and_score(config.learner, data.train.matrix.values(), data.test.matrix.values(), data.train,
                         data.test, full_model_seed(config.master_seed, dataset.n_features()));
}

GridResult run_cross(const Dataset& train_ds, const Dataset& test_ds, const ExperimentConfig& config) {
    config.validate();
    auto [train, test] = align_features(train_ds, test_ds);
    test = Dataset(std::move(test.matrix), relabel(test.labels, train.labels));
    std::vector<std::string> warnings;
    if (train.matrix.values() == test.matrix.values()) {
        warnings.emplace_back("training and test data are identical; scores measure memorisation");
        log_line(config, "warning: " + warnings.back());
    }
    auto result = run_grid(standardize_pair(train, test), config);
    result.warnings = std::move(warnings);
    return result;
}

std::vector<std::string> read_feature_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open feature list '" + path.string() + "'");
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto last = line.find_last_not_of(" \t\r");
        names.push_back(line.substr(first, last - first + 1));
    }
    return names;
}

PublishedComparison compare_published(const Dataset& dataset,
                                      const std::vector<std::string>& feature_list,
                                      const ExperimentConfig& config, double multiplier_c) {
    config.validate();
    if (feature_list.empty()) throw Error(ErrorCode::InvalidArgument, "the feature list is empty");
    if (!(multiplier_c >= 1.0)) throw Error(ErrorCode::InvalidArgument, "multiplier must be >= 1");

    const auto& names = dataset.matrix.feature_names();
    std::unordered_map<std::string, std::size_t> position;
    for (std::size_t j = 0; j < names.size(); ++j) position.emplace(names[j], j);
    std::vector<std::size_t> listed;
    std::vector<std::string> unknown;
    std::unordered_set<std::size_t> seen;
    for (const auto& name : feature_list) {
        const auto it = position.find(name);
        if (it == position.end()) {
            unknown.push_back(name);
        } else if (seen.insert(it->second).second) {
            listed.push_back(it->second);
        }
    }
    if (!unknown.empty()) throw UnknownFeatureNamesError(std::move(unknown));
    std::sort(listed.begin(), listed.end());

    const std::size_t p = dataset.n_features();
    PublishedComparison out;
    out.feature_list = feature_list;
    out.multiplier_c = multiplier_c;
    out.list_size = listed.size();
    out.random_size = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(multiplier_c * static_cast<double>(listed.size()) + 0.5)),
        1, p);
    out.one_percent_size = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::floor(0.01 * static_cast<double>(p) + 0.5)), 1, p);

    log_line(config, "stratified split of " + std::to_string(dataset.n_samples()) + " samples");
    const auto split = stratified_split(dataset, config.test_fraction, split_seed(config.master_seed));
    const auto data = standardize_pair(split.train, split.test);

    // The published-list model reuses the full-feature seed so that a list
    // naming every feature reproduces the full-feature column exactly.
    const std::uint64_t full_seed = full_model_seed(config.master_seed, p);
    log_line(config, "all-feature and published-list models");
    out.all_features = fit_and_score(config.learner, data.train.matrix.values(),
                                     data.test.matrix.values(), data.train, data.test, full_seed);
    out.published = fit_and_score(config.learner, select_columns(data.train.matrix.values(), listed),
                                  select_columns(data.test.matrix.values(), listed), data.train,
                                  data.test, full_seed);
    out.runs.push_back({RunMode::Full, p, 0, full_seed, out.all_features.accuracy, out.all_features.auc});
    out.runs.push_back({RunMode::Published, listed.size(), 0, full_seed, out.published.accuracy,
                        out.published.auc});

    log_line(config, "random subsets of size " + std::to_string(out.random_size));
    const std::size_t sizes[] = {out.random_size};
    const auto random_runs = random_subset_runs(data, sizes, config);
    const auto summary = summarize(random_runs).front();
    out.random_same_size = {summary.mean_accuracy, summary.mean_auc};
    out.random_same_size_std = {summary.std_accuracy, summary.std_auc};
    out.runs.insert(out.runs.end(), random_runs.begin(), random_runs.end());

    const SeedContext ensemble_ctx{config.master_seed, "ensemble"};
    auto ensemble_score = [&](std::size_t size, std::size_t run_index) {
        log_line(config, "ensemble at subset size " + std::to_string(size));
        EnsembleSpec spec;
        spec.subset_size = size;
        const auto model = fit_ensemble(data.train, spec, ensemble_ctx, config.learner);
        const auto score = evaluate(model.predict_proba(data.test.matrix.values()), data.test.labels);
        out.runs.push_back({RunMode::Ensemble, size, run_index, derive_seed(ensemble_ctx, size, 0),
                            score.accuracy, score.auc});
        return score;
    };
    out.ensemble_same_size = ensemble_score(out.random_size, 0);
    out.ensemble_one_percent = ensemble_score(out.one_percent_size, 1);

    std::sort(out.runs.begin(), out.runs.end(), record_order);
    return out;
}

PublishedComparison run_published(const Dataset& dataset, const std::filesystem::path& feature_list_path,
                                  const ExperimentConfig& config, double multiplier_c) {
    return compare_published(dataset, read_feature_list(feature_list_path), config, multiplier_c);
}

}  // namespace fsnull
