#include "fsnull/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "fsnull/error.hpp"

namespace fsnull {

std::string_view to_string(RunMode mode) noexcept {
    switch (mode) {
        case RunMode::Full: return "full";
        case RunMode::Random: return "random";
        case RunMode::Published: return "published";
        case RunMode::Ensemble: return "ensemble";
    }
    return "?";
}

std::optional<RunMode> parse_run_mode(std::string_view text) noexcept {
    for (const auto mode : {RunMode::Full, RunMode::Random, RunMode::Published, RunMode::Ensemble}) {
        if (text == to_string(mode)) return mode;
    }
    return std::nullopt;
}

bool record_order(const RunRecord& a, const RunRecord& b) noexcept {
    return std::tuple(a.mode, a.subset_size, a.run_index) <
           std::tuple(b.mode, b.subset_size, b.run_index);
}

std::vector<int> predicted_classes(const ProbabilityMatrix& proba) {
    std::vector<int> out(proba.rows(), 0);
    for (std::size_t i = 0; i < proba.rows(); ++i) {
        const auto row = proba.row(i);
        out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

double accuracy(const LabelVector& y_true, const ProbabilityMatrix& proba) {
    if (y_true.size() != proba.rows()) {
        throw Error(ErrorCode::LengthMismatch, "accuracy: label and prediction counts differ");
    }
    if (y_true.size() == 0) throw Error(ErrorCode::LengthMismatch, "accuracy: no samples");
    const auto predicted = predicted_classes(proba);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == y_true.labels[i];
    return static_cast<double>(hits) / static_cast<double>(predicted.size());
}

double auc_binary(std::span<const int> positive, std::span<const double> scores) {
    if (positive.size() != scores.size()) {
        throw Error(ErrorCode::LengthMismatch, "auc: label and score counts differ");
    }
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the mid-rank keeps every quantity an exact integer.
    double positive_rank_sum_x2 = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t start = 0; start < n;) {
        std::size_t end = start + 1;
        while (end < n && scores[order[end]] == scores[order[start]]) ++end;
        const double rank_x2 = static_cast<double>(start + 1 + end);
        for (std::size_t i = start; i < end; ++i) {
            if (positive[order[i]] != 0) {
                positive_rank_sum_x2 += rank_x2;
                ++n_pos;
            }
        }
        start = end;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw Error(ErrorCode::SingleClassPresent, "auc: needs both positive and negative samples");
    }
    // 2U = 2 * rank_sum - n_pos (n_pos + 1); the halves of tied pairs
    // stay exact in 2U.
    const double u_x2 = positive_rank_sum_x2 - static_cast<double>(n_pos * (n_pos + 1));
    return (u_x2 / 2.0) / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_binary(const LabelVector& y_true, std::span<const double> scores) {
    if (y_true.class_count() != 2) {
        throw Error(ErrorCode::InvalidArgument, "binary auc needs exactly two classes");
    }
    return auc_binary(std::span<const int>(y_true.labels), scores);
}

OvrAuc auc_one_vs_rest(const LabelVector& y_true, const ProbabilityMatrix& proba) {
    const std::size_t k = y_true.class_count();
    if (k < 2) throw Error(ErrorCode::SingleClassPresent, "auc: fewer than two classes");
    if (proba.rows() != y_true.size() || proba.cols() != k) {
        throw Error(ErrorCode::LengthMismatch, "auc: probability matrix shape does not match labels");
    }
    const auto counts = y_true.class_counts();
    const auto present = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
    if (present < 2) {
        throw Error(ErrorCode::SingleClassPresent, "auc: only one class present in y_true");
    }

    std::vector<double> column(proba.rows());
    std::vector<int> positive(proba.rows());
    auto class_auc = [&](std::size_t c) {
        for (std::size_t i = 0; i < proba.rows(); ++i) {
            column[i] = proba(i, c);
            positive[i] = y_true.labels[i] == static_cast<int>(c);
        }
        return auc_binary(positive, column);
    };

    OvrAuc result;
    if (k == 2) {
        result.value = class_auc(1);
        return result;
    }
    double total = 0.0;
    std::size_t used = 0;
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            result.skipped_classes.push_back(c);
            continue;
        }
        total += class_auc(c);
        ++used;
    }
    result.value = total / static_cast<double>(used);
    return result;
}

double auc_multiclass(const LabelVector& y_true, const ProbabilityMatrix& proba) {
    return auc_one_vs_rest(y_true, proba).value;
}

std::vector<SummaryRecord> summarize(std::span<const RunRecord> records) {
    std::map<std::size_t, std::vector<const RunRecord*>> groups;
    for (const auto& r : records) groups[r.subset_size].push_back(&r);

    std::vector<SummaryRecord> out;
    out.reserve(groups.size());
    for (auto& [size, group] : groups) {
        if (group.empty()) throw Error(ErrorCode::EmptyGroup, "summarize: empty group");
        std::stable_sort(group.begin(), group.end(), [](const RunRecord* a, const RunRecord* b) {
            return a->run_index < b->run_index;
        });
        const double n = static_cast<double>(group.size());
        auto mean_std = [&](double RunRecord::*field) {
            double sum = 0.0;
            for (const auto* r : group) sum += r->*field;
            const double mean = sum / n;
            double sq = 0.0;
            for (const auto* r : group) {
                const double d = r->*field - mean;
                sq += d * d;
            }
            return std::pair(mean, std::sqrt(sq / n));
        };
        const auto [mean_acc, std_acc] = mean_std(&RunRecord::accuracy);
        const auto [mean_auc, std_auc] = mean_std(&RunRecord::auc);
        out.push_back({size, group.size(), mean_acc, std_acc, mean_auc, std_auc});
    }
    return out;
}

}  // namespace fsnull
