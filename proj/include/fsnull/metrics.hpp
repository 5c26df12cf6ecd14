#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fsnull/data.hpp"
#include "fsnull/learners.hpp"

namespace fsnull {

/// Order matters: emitted tables are sorted by mode in this order.
enum class RunMode { Full, Random, Published, Ensemble };

std::string_view to_string(RunMode mode) noexcept;
std::optional<RunMode> parse_run_mode(std::string_view text) noexcept;

struct RunRecord {
    RunMode mode = RunMode::Random;
    std::size_t subset_size = 0;
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double accuracy = 0.0;
    double auc = 0.0;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// Ordering used for every emitted table: (mode, subset_size, run_index).
bool record_order(const RunRecord& a, const RunRecord& b) noexcept;

struct SummaryRecord {
    std::size_t subset_size = 0;
    std::size_t n_runs = 0;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    double mean_auc = 0.0;
    double std_auc = 0.0;

    friend bool operator==(const SummaryRecord&, const SummaryRecord&) = default;
};

/// Fraction of rows whose argmax (lowest class on ties) is the true class.
double accuracy(const LabelVector& y_true, const ProbabilityMatrix& proba);

/// Class index predicted for each row: argmax with ties to the lowest index.
std::vector<int> predicted_classes(const ProbabilityMatrix& proba);

/// Mann-Whitney AUC: (wins + ties / 2) / (n_pos * n_neg), computed from
/// mid-ranks. Samples with a non-zero `positive` entry are the positives.
double auc_binary(std::span<const int> positive, std::span<const double> scores);

/// Binary AUC for a two-class LabelVector; scores are P(class 1).
double auc_binary(const LabelVector& y_true, std::span<const double> scores);

struct OvrAuc {
    double value = 0.0;
    /// Classes with no positive sample in y_true; left out of the mean.
    std::vector<std::size_t> skipped_classes;
};

/// Macro one-vs-rest AUC. Two-class input reduces to auc_binary on the
/// class-1 column.
OvrAuc auc_one_vs_rest(const LabelVector& y_true, const ProbabilityMatrix& proba);
double auc_multiclass(const LabelVector& y_true, const ProbabilityMatrix& proba);

/// Groups by subset_size; mean and population std of accuracy and AUC per
/// group, ascending by size. Within a group values are accumulated in
/// run_index order.
std::vector<SummaryRecord> summarize(std::span<const RunRecord> records);

}  // namespace fsnull
