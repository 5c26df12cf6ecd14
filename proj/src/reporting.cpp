#include "fsnull/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fsnull/error.hpp"
#include "fsnull/format.hpp"

namespace fsnull {

namespace {

std::vector<std::string_view> split(std::string_view text, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto end = text.find(delim, start);
        out.push_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines;
    for (auto line : split(text, '\n')) {
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

template <typename Int>
Int parse_int(std::string_view text, const char* what) {
    Int value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(text) + "'");
    }
    return value;
}

double parse_double(std::string_view text, const char* what) {
    const auto v = parse_real(text);
    if (!v) throw Error(ErrorCode::ParseError, std::string("bad ") + what + " '" + std::string(text) + "'");
    return *v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read '" + path.string() + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

std::vector<std::string_view> body_rows(std::string_view text, std::string_view header,
                                        const char* table) {
    auto lines = lines_of(text);
    if (lines.empty() || lines.front() != header) {
        throw Error(ErrorCode::ParseError, std::string(table) + " table header must be '" +
                                               std::string(header) + "'");
    }
    lines.erase(lines.begin());
    return lines;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape_xml(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Frame {
    double width = 900, height = 540;
    double left = 80, right = 190, top = 60, bottom = 70;
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  // data domain

    double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
    double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
    double plot_right() const { return width - right; }
    double plot_bottom() const { return height - bottom; }
};

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void open_svg(std::ostringstream& os, const Frame& f) {
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\"" << f.height
       << "\" viewBox=\"0 0 " << f.width << ' ' << f.height << "\" font-family=\"sans-serif\">\n"
       << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << f.width << "\" height=\"" << f.height
       << "\" fill=\"white\"/>\n";
}

void draw_axes(std::ostringstream& os, const Frame& f) {
    os << "<line class=\"axis\" x1=\"" << f.left << "\" y1=\"" << f.plot_bottom() << "\" x2=\""
       << f.plot_right() << "\" y2=\"" << f.plot_bottom() << "\" stroke=\"black\"/>\n"
       << "<line class=\"axis\" x1=\"" << f.left << "\" y1=\"" << f.top << "\" x2=\"" << f.left
       << "\" y2=\"" << f.plot_bottom() << "\" stroke=\"black\"/>\n";
}

void draw_y_ticks(std::ostringstream& os, const Frame& f) {
    for (int i = 0; i <= 4; ++i) {
        const double v = f.y0 + (f.y1 - f.y0) * i / 4.0;
        const double y = f.py(v);
        os << "<line class=\"tick\" x1=\"" << f.left - 5 << "\" y1=\"" << y << "\" x2=\"" << f.left
           << "\" y2=\"" << y << "\" stroke=\"black\"/>\n"
           << "<text class=\"tick-label\" x=\"" << f.left - 8 << "\" y=\"" << y + 4
           << "\" font-size=\"11\" text-anchor=\"end\">" << fixed(v, 3) << "</text>\n";
    }
}

}  // namespace

std::string format_runs_table(std::span<const RunRecord> runs) {
    std::vector<RunRecord> sorted(runs.begin(), runs.end());
    std::stable_sort(sorted.begin(), sorted.end(), record_order);
    std::string out(kRunsHeader);
    out += '\n';
    for (const auto& r : sorted) {
        out += to_string(r.mode);
        out += ',' + std::to_string(r.subset_size) + ',' + std::to_string(r.run_index) + ',' +
               std::to_string(r.seed) + ',' + format_real(r.accuracy) + ',' + format_real(r.auc) + '\n';
    }
    return out;
}

std::string format_summary_table(std::span<const SummaryRecord> summaries) {
    std::vector<SummaryRecord> sorted(summaries.begin(), summaries.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.subset_size < b.subset_size; });
    std::string out(kSummaryHeader);
    out += '\n';
    for (const auto& s : sorted) {
        out += std::to_string(s.subset_size) + ',' + std::to_string(s.n_runs) + ',' +
               format_real(s.mean_accuracy) + ',' + format_real(s.std_accuracy) + ',' +
               format_real(s.mean_auc) + ',' + format_real(s.std_auc) + '\n';
    }
    return out;
}

std::string format_verdict(VerdictMetric metric, const Verdict& verdict) {
    std::string out;
    out += "metric: " + std::string(to_string(metric)) + '\n';
    out += "full_value: " + format_real(verdict.full_value) + '\n';
    out += "best_size: " + std::to_string(verdict.best_size) + '\n';
    out += "best_mean: " + format_real(verdict.best_mean) + '\n';
    out += "level: " + std::string(to_string(verdict.level)) + '\n';
    return out;
}

std::vector<RunRecord> parse_runs_table(std::string_view text) {
    std::vector<RunRecord> runs;
    for (const auto line : body_rows(text, kRunsHeader, "runs")) {
        const auto cells = split(line, ',');
        if (cells.size() != 6) throw Error(ErrorCode::ParseError, "runs row needs 6 cells: " + std::string(line));
        const auto mode = parse_run_mode(cells[0]);
        if (!mode) throw Error(ErrorCode::ParseError, "unknown mode '" + std::string(cells[0]) + "'");
        runs.push_back({*mode, parse_int<std::size_t>(cells[1], "subset_size"),
                        parse_int<std::size_t>(cells[2], "run_index"),
                        parse_int<std::uint64_t>(cells[3], "seed"), parse_double(cells[4], "accuracy"),
                        parse_double(cells[5], "auc")});
    }
    return runs;
}

std::vector<SummaryRecord> parse_summary_table(std::string_view text) {
    std::vector<SummaryRecord> out;
    for (const auto line : body_rows(text, kSummaryHeader, "summary")) {
        const auto cells = split(line, ',');
        if (cells.size() != 6) {
            throw Error(ErrorCode::ParseError, "summary row needs 6 cells: " + std::string(line));
        }
        out.push_back({parse_int<std::size_t>(cells[0], "subset_size"),
                       parse_int<std::size_t>(cells[1], "n_runs"), parse_double(cells[2], "mean_accuracy"),
                       parse_double(cells[3], "std_accuracy"), parse_double(cells[4], "mean_auc"),
                       parse_double(cells[5], "std_auc")});
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto line : lines_of(text)) {
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            throw Error(ErrorCode::ParseError, "expected 'key: value', got '" + std::string(line) + "'");
        }
        auto value = line.substr(colon + 1);
        while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
        out.emplace_back(std::string(line.substr(0, colon)), std::string(value));
    }
    return out;
}

VerdictRecord parse_verdict(std::string_view text) {
    VerdictRecord record;
    bool seen[5] = {};
    for (const auto& [key, value] : parse_key_values(text)) {
        if (key == "metric") {
            const auto m = parse_verdict_metric(value);
            if (!m) throw Error(ErrorCode::ParseError, "unknown metric '" + value + "'");
            record.metric = *m;
            seen[0] = true;
        } else if (key == "full_value") {
            record.verdict.full_value = parse_double(value, "full_value");
            seen[1] = true;
        } else if (key == "best_size") {
            record.verdict.best_size = parse_int<std::size_t>(value, "best_size");
            seen[2] = true;
        } else if (key == "best_mean") {
            record.verdict.best_mean = parse_double(value, "best_mean");
            seen[3] = true;
        } else if (key == "level") {
            const auto level = parse_verdict_level(value);
            if (!level) throw Error(ErrorCode::ParseError, "unknown level '" + value + "'");
            record.verdict.level = *level;
            seen[4] = true;
        } else {
            throw Error(ErrorCode::ParseError, "unexpected verdict key '" + key + "'");
        }
    }
    if (!std::all_of(std::begin(seen), std::end(seen), [](bool b) { return b; })) {
        throw Error(ErrorCode::ParseError, "verdict record is missing keys");
    }
    return record;
}

std::vector<RunRecord> read_runs_table(const std::filesystem::path& path) {
    return parse_runs_table(read_file(path));
}

std::vector<SummaryRecord> read_summary_table(const std::filesystem::path& path) {
    return parse_summary_table(read_file(path));
}

VerdictRecord read_verdict(const std::filesystem::path& path) { return parse_verdict(read_file(path)); }

void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string text;
    for (const auto& [key, value] : entries) text += key + ": " + value + '\n';
    write_file(path, text);
}

std::string metric_display_name(VerdictMetric metric) {
    return metric == VerdictMetric::Auc ? "AUC" : "Accuracy";
}

ReportBundle emit_tables(const GridResult& result, const std::filesystem::path& out_dir) {
    if (out_dir.empty()) throw Error(ErrorCode::IoError, "output directory path is empty");
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir)) {
        throw Error(ErrorCode::IoError, "cannot create output directory '" + out_dir.string() + "'");
    }
    ReportBundle bundle{out_dir / "runs.csv", out_dir / "summary.csv", out_dir / "verdict.txt",
                        out_dir / "curve.svg", std::nullopt};
    write_file(bundle.runs_table_path, format_runs_table(result.runs));
    write_file(bundle.summary_table_path, format_summary_table(result.summaries));
    write_file(bundle.verdict_path, format_verdict(result.metric, result.verdict));
    render_curve_svg(result.summaries, result.full_value(), metric_display_name(result.metric),
                     bundle.curve_svg_path);
    return bundle;
}

std::string curve_svg(std::span<const SummaryRecord> summaries, double full_value,
                      std::string_view metric_name) {
    if (summaries.empty()) throw Error(ErrorCode::EmptySummaries, "no summaries to plot");
    const bool is_auc = metric_name == "AUC" || metric_name == "auc";
    auto mean_of = [&](const SummaryRecord& s) { return is_auc ? s.mean_auc : s.mean_accuracy; };
    auto std_of = [&](const SummaryRecord& s) { return is_auc ? s.std_auc : s.std_accuracy; };

    std::vector<SummaryRecord> sorted(summaries.begin(), summaries.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.subset_size < b.subset_size; });
    std::size_t n_runs = 0;
    for (const auto& s : sorted) n_runs = std::max(n_runs, s.n_runs);

    const double references[3] = {full_value, full_value * 0.98, full_value * 0.95};
    const char* reference_names[3] = {"All features", "Within 2%", "Within 5%"};
    const char* reference_keys[3] = {"full", "within2", "within5"};

    Frame f;
    f.x0 = std::log10(static_cast<double>(std::max<std::size_t>(sorted.front().subset_size, 1)));
    f.x1 = std::log10(static_cast<double>(std::max<std::size_t>(sorted.back().subset_size, 1)));
    if (f.x1 - f.x0 < 1e-9) {
        f.x0 -= 0.5;
        f.x1 += 0.5;
    }
    double lo = references[2];
    double hi = references[0];
    for (const auto& s : sorted) {
        lo = std::min(lo, mean_of(s) - std_of(s));
        hi = std::max(hi, mean_of(s) + std_of(s));
    }
    const double pad = std::max((hi - lo) * 0.05, 1e-3);
    f.y0 = lo - pad;
    f.y1 = hi + pad;

    std::ostringstream os;
    os.precision(6);
    open_svg(os, f);
    os << "<text class=\"title\" x=\"" << f.width / 2 << "\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">"
       << escape_xml(metric_name) << " vs random subset size (mean and std over " << n_runs
       << " runs)</text>\n";
    draw_axes(os, f);
    draw_y_ticks(os, f);

    for (int e = static_cast<int>(std::ceil(f.x0 - 1e-9)); e <= static_cast<int>(std::floor(f.x1 + 1e-9)); ++e) {
        const double x = f.px(e);
        os << "<line class=\"tick\" x1=\"" << x << "\" y1=\"" << f.plot_bottom() << "\" x2=\"" << x
           << "\" y2=\"" << f.plot_bottom() + 5 << "\" stroke=\"black\"/>\n"
           << "<text class=\"tick-label\" x=\"" << x << "\" y=\"" << f.plot_bottom() + 18
           << "\" font-size=\"11\" text-anchor=\"middle\">" << static_cast<long long>(std::llround(std::pow(10.0, e)))
           << "</text>\n";
    }
    os << "<text class=\"axis-label\" x=\"" << (f.left + f.plot_right()) / 2 << "\" y=\"" << f.height - 20
       << "\" font-size=\"13\" text-anchor=\"middle\">Random subset size (log scale)</text>\n"
       << "<text class=\"axis-label\" x=\"20\" y=\"" << (f.top + f.plot_bottom()) / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << (f.top + f.plot_bottom()) / 2 << ")\">" << escape_xml(metric_name) << "</text>\n";

    // Band: upper edge left to right, then lower edge back.
    std::vector<std::pair<double, double>> upper, lower;
    for (const auto& s : sorted) {
        const double x = f.px(std::log10(static_cast<double>(std::max<std::size_t>(s.subset_size, 1))));
        upper.emplace_back(x, f.py(mean_of(s) + std_of(s)));
        lower.emplace_back(x, f.py(mean_of(s) - std_of(s)));
    }
    if (sorted.size() == 1) {
        upper = {{upper[0].first - 4, upper[0].second}, {upper[0].first + 4, upper[0].second}};
        lower = {{lower[0].first - 4, lower[0].second}, {lower[0].first + 4, lower[0].second}};
    }
    os << "<polygon class=\"band\" fill=\"#1f77b4\" fill-opacity=\"0.25\" stroke=\"none\" points=\"";
    for (const auto& [x, y] : upper) os << x << ',' << y << ' ';
    for (auto it = lower.rbegin(); it != lower.rend(); ++it) os << it->first << ',' << it->second << ' ';
    os << "\"/>\n";

    os << "<polyline class=\"mean\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (const auto& s : sorted) {
        os << f.px(std::log10(static_cast<double>(std::max<std::size_t>(s.subset_size, 1)))) << ','
           << f.py(mean_of(s)) << ' ';
    }
    os << "\"/>\n";
    for (const auto& s : sorted) {
        os << "<circle class=\"mean-point\" cx=\""
           << f.px(std::log10(static_cast<double>(std::max<std::size_t>(s.subset_size, 1)))) << "\" cy=\""
           << f.py(mean_of(s)) << "\" r=\"2\" fill=\"#1f77b4\"/>\n";
    }

    const char* colours[3] = {"#d62728", "#ff7f0e", "#2ca02c"};
    for (int i = 0; i < 3; ++i) {
        const double y = f.py(references[i]);
        os << "<line class=\"reference\" data-reference=\"" << reference_keys[i] << "\" x1=\"" << f.left
           << "\" y1=\"" << y << "\" x2=\"" << f.plot_right() << "\" y2=\"" << y << "\" stroke=\""
           << colours[i] << "\" stroke-dasharray=\"6 4\"/>\n"
           << "<text class=\"reference-label\" data-reference=\"" << reference_keys[i] << "\" x=\""
           << f.plot_right() + 6 << "\" y=\"" << y + 4 << "\" font-size=\"11\" fill=\"" << colours[i]
           << "\">" << reference_names[i] << " (" << fixed(references[i], 3) << ")</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void render_curve_svg(std::span<const SummaryRecord> summaries, double full_value,
                      std::string_view metric_name, const std::filesystem::path& path) {
    write_file(path, curve_svg(summaries, full_value, metric_name));
}

std::string component_axis_label(std::size_t index, double ratio) {
    return "PC" + std::to_string(index + 1) + " (" + fixed(ratio * 100.0, 1) + "%)";
}

std::string scatter_svg(const PcaResult& pca, const LabelVector& labels) {
    if (pca.dimensions() < 2 || pca.projection.cols() < 2) {
        throw Error(ErrorCode::NeedTwoComponents, "scatter plot needs two principal components");
    }
    if (pca.projection.rows() != labels.size()) {
        throw Error(ErrorCode::LengthMismatch, "projection rows and labels differ in count");
    }
    Frame f;
    f.width = 700;
    f.height = 560;
    f.right = 170;
    double xmin = pca.projection(0, 0), xmax = xmin, ymin = pca.projection(0, 1), ymax = ymin;
    for (std::size_t i = 0; i < pca.projection.rows(); ++i) {
        xmin = std::min(xmin, pca.projection(i, 0));
        xmax = std::max(xmax, pca.projection(i, 0));
        ymin = std::min(ymin, pca.projection(i, 1));
        ymax = std::max(ymax, pca.projection(i, 1));
    }
    const double xpad = std::max((xmax - xmin) * 0.05, 1e-9);
    const double ypad = std::max((ymax - ymin) * 0.05, 1e-9);
    f.x0 = xmin - xpad;
    f.x1 = xmax + xpad;
    f.y0 = ymin - ypad;
    f.y1 = ymax + ypad;

    std::ostringstream os;
    os.precision(6);
    open_svg(os, f);
    os << "<text class=\"title\" x=\"" << f.width / 2
       << "\" y=\"30\" font-size=\"16\" text-anchor=\"middle\">PCA projection</text>\n";
    draw_axes(os, f);
    os << "<text class=\"axis-label\" data-axis=\"x\" x=\"" << (f.left + f.plot_right()) / 2 << "\" y=\""
       << f.height - 20 << "\" font-size=\"13\" text-anchor=\"middle\">"
       << component_axis_label(0, pca.explained_variance_ratio[0]) << "</text>\n"
       << "<text class=\"axis-label\" data-axis=\"y\" x=\"20\" y=\"" << (f.top + f.plot_bottom()) / 2
       << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
       << (f.top + f.plot_bottom()) / 2 << ")\">" << component_axis_label(1, pca.explained_variance_ratio[1])
       << "</text>\n";

    constexpr std::size_t n_colours = std::size(kPalette);
    for (std::size_t i = 0; i < pca.projection.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels.labels[i]);
        os << "<circle class=\"point\" data-class=\"" << c << "\" cx=\"" << f.px(pca.projection(i, 0))
           << "\" cy=\"" << f.py(pca.projection(i, 1)) << "\" r=\"3\" fill=\"" << kPalette[c % n_colours]
           << "\" fill-opacity=\"0.8\"/>\n";
    }
    for (std::size_t c = 0; c < labels.class_count(); ++c) {
        const double y = f.top + 10 + 20.0 * static_cast<double>(c);
        os << "<g class=\"legend-entry\"><rect x=\"" << f.plot_right() + 15 << "\" y=\"" << y - 9
           << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[c % n_colours] << "\"/><text x=\""
           << f.plot_right() + 33 << "\" y=\"" << y + 1 << "\" font-size=\"12\">"
           << escape_xml(labels.class_names[c]) << "</text></g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void render_scatter_svg(const PcaResult& pca, const LabelVector& labels,
                        const std::filesystem::path& path) {
    write_file(path, scatter_svg(pca, labels));
}

}  // namespace fsnull
