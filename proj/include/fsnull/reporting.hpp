#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fsnull/data.hpp"
#include "fsnull/diagnostics.hpp"
#include "fsnull/metrics.hpp"
#include "fsnull/protocol.hpp"

namespace fsnull {

inline constexpr std::string_view kRunsHeader = "mode,subset_size,run_index,seed,accuracy,auc";
inline constexpr std::string_view kSummaryHeader =
    "subset_size,n_runs,mean_accuracy,std_accuracy,mean_auc,std_auc";

struct ReportBundle {
    std::filesystem::path runs_table_path;
    std::filesystem::path summary_table_path;
    std::filesystem::path verdict_path;
    std::filesystem::path curve_svg_path;
    std::optional<std::filesystem::path> scatter_svg_path;
};

/// Parsed form of the verdict record.
struct VerdictRecord {
    VerdictMetric metric = VerdictMetric::Auc;
    Verdict verdict;
};

/// Table text; rows are emitted in record_order.
std::string format_runs_table(std::span<const RunRecord> runs);
std::string format_summary_table(std::span<const SummaryRecord> summaries);
std::string format_verdict(VerdictMetric metric, const Verdict& verdict);

std::vector<RunRecord> parse_runs_table(std::string_view text);
std::vector<SummaryRecord> parse_summary_table(std::string_view text);
VerdictRecord parse_verdict(std::string_view text);

std::vector<RunRecord> read_runs_table(const std::filesystem::path& path);
std::vector<SummaryRecord> read_summary_table(const std::filesystem::path& path);
VerdictRecord read_verdict(const std::filesystem::path& path);

/// Writes runs.csv, summary.csv, verdict.txt and curve.svg into `out_dir`,
/// creating it when needed.
ReportBundle emit_tables(const GridResult& result, const std::filesystem::path& out_dir);

/// "key: value" per line.
void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries);
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

std::string metric_display_name(VerdictMetric metric);

/// Mean curve with a mean +/- std band over a log10 size axis, plus dashed
/// reference lines at full_value, 98% and 95% of it.
std::string curve_svg(std::span<const SummaryRecord> summaries, double full_value,
                      std::string_view metric_name);
void render_curve_svg(std::span<const SummaryRecord> summaries, double full_value,
                      std::string_view metric_name, const std::filesystem::path& path);

/// Scatter of the first two principal components, one colour per class.
std::string scatter_svg(const PcaResult& pca, const LabelVector& labels);
void render_scatter_svg(const PcaResult& pca, const LabelVector& labels,
                        const std::filesystem::path& path);

/// "PC1 (50.0%)" style label for component `index` (0-based).
std::string component_axis_label(std::size_t index, double ratio);

}  // namespace fsnull
