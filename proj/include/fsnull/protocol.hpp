#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fsnull/data.hpp"
#include "fsnull/learners.hpp"
#include "fsnull/metrics.hpp"

namespace fsnull {

enum class VerdictMetric { Auc, Accuracy };

std::string_view to_string(VerdictMetric metric) noexcept;
std::optional<VerdictMetric> parse_verdict_metric(std::string_view text) noexcept;

struct Tolerances {
    double surpass_delta = 0.002;
    double within_full = 0.002;
    double within2 = 0.02;
    double within5 = 0.05;
};

struct ExperimentConfig {
    std::size_t n_runs = 20;
    double test_fraction = 0.2;
    VerdictMetric metric = VerdictMetric::Auc;
    std::uint64_t master_seed = 42;
    LearnerConfig learner;
    Tolerances tolerances;
    /// Worker count for the (size, run) grid; 0 uses every hardware thread.
    std::size_t threads = 0;
    /// Receives one line per stage; may be empty.
    std::function<void(std::string_view)> log;

    void validate() const;
};

/// Ordered from worst to best so that comparisons follow verdict strength.
enum class VerdictLevel { No, Within5, Within2, Yes, Surpasses };

std::string_view to_string(VerdictLevel level) noexcept;
std::optional<VerdictLevel> parse_verdict_level(std::string_view text) noexcept;

struct Verdict {
    VerdictLevel level = VerdictLevel::No;
    std::size_t best_size = 0;
    double best_mean = 0.0;
    double full_value = 0.0;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct GridResult {
    VerdictMetric metric = VerdictMetric::Auc;
    std::vector<RunRecord> runs;  // sorted by record_order, one Full record
    std::vector<SummaryRecord> summaries;
    double full_accuracy = 0.0;
    double full_auc = 0.0;
    std::size_t p = 0;
    std::size_t n_runs = 0;
    Verdict verdict;
    std::vector<std::string> warnings;

    double full_value() const noexcept {
        return metric == VerdictMetric::Auc ? full_auc : full_accuracy;
    }
};

/// Best mean over the schedule (smallest size on ties) judged against the
/// full-feature value:
///   Surpasses  best > full + surpass_delta
///   Yes        best >= full - within_full
///   Within2    best >= full * (1 - within2)
///   Within5    best >= full * (1 - within5)
///   No         otherwise
Verdict compute_verdict(std::span<const SummaryRecord> summaries, double full_value,
                        VerdictMetric metric, const Tolerances& tolerances);

/// One stratified split of `dataset`, then the full-feature baseline and
/// every (schedule size, run) random-subset model on it.
GridResult run_intra(const Dataset& dataset, const ExperimentConfig& config);

/// As run_intra, but trains on all of `train_ds` and tests on all of
/// `test_ds` after aligning the test columns to the training order.
GridResult run_cross(const Dataset& train_ds, const Dataset& test_ds, const ExperimentConfig& config);

struct ColumnScore {
    double accuracy = 0.0;
    double auc = 0.0;
};

/// The full-feature column of run_intra on its own: same split,
/// standardization and model seed, without the random-subset grid.
ColumnScore score_full_features(const Dataset& dataset, const ExperimentConfig& config);

struct PublishedComparison {
    std::vector<std::string> feature_list;
    double multiplier_c = 1.0;
    std::size_t list_size = 0;
    std::size_t random_size = 0;       // round(c * list_size), at most p
    std::size_t one_percent_size = 0;  // round(0.01 * p), at least 1
    ColumnScore all_features;
    ColumnScore published;
    ColumnScore random_same_size;  // mean over n_runs
    ColumnScore random_same_size_std;
    ColumnScore ensemble_same_size;
    ColumnScore ensemble_one_percent;
    std::vector<RunRecord> runs;
};

/// Feature names, one per line; blank lines and '#' comments are skipped.
std::vector<std::string> read_feature_list(const std::filesystem::path& path);

PublishedComparison compare_published(const Dataset& dataset,
                                      const std::vector<std::string>& feature_list,
                                      const ExperimentConfig& config, double multiplier_c = 1.0);

PublishedComparison run_published(const Dataset& dataset, const std::filesystem::path& feature_list_path,
                                  const ExperimentConfig& config, double multiplier_c = 1.0);

}  // namespace fsnull
