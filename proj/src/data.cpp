#include "fsnull/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "fsnull/error.hpp"
#include "fsnull/format.hpp"
#include "fsnull/random.hpp"

namespace fsnull {

namespace {

template <typename Names>
void require_unique(const Names& names, ErrorCode code, const char* what) {
    std::unordered_set<std::string> seen;
    seen.reserve(names.size());
    for (const auto& n : names) {
        if (!seen.insert(n).second) {
            throw Error(code, std::string("duplicate ") + what + " '" + n + "'");
        }
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one line on `delim`. Double-quoted cells may contain the delimiter;
// a doubled quote inside quotes is a literal quote.
std::vector<std::string> split_line(std::string_view line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == delim) {
            cells.emplace_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    cells.emplace_back(trim(cell));
    return cells;
}

bool parse_finite(std::string_view text, double& out) {
    const auto parsed = parse_real(text);
    if (!parsed || !std::isfinite(*parsed)) return false;
    out = *parsed;
    return true;
}

}  // namespace

DataMatrix::DataMatrix(Matrix values, std::vector<std::string> feature_names,
                       std::vector<std::string> sample_ids)
    : values_(std::move(values)),
      feature_names_(std::move(feature_names)),
      sample_ids_(std::move(sample_ids)) {
    if (feature_names_.size() != values_.cols()) {
        throw Error(ErrorCode::InvalidMatrix, "feature name count does not match column count");
    }
    if (sample_ids_.size() != values_.rows()) {
        throw Error(ErrorCode::InvalidMatrix, "sample id count does not match row count");
    }
    for (const double v : values_.data()) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidMatrix, "matrix contains NaN or infinity");
    }
    require_unique(feature_names_, ErrorCode::DuplicateFeatureName, "feature name");
    require_unique(sample_ids_, ErrorCode::DuplicateSampleId, "sample id");
}

DataMatrix DataMatrix::select_features(std::span<const std::size_t> columns) const {
    std::vector<std::string> names;
    names.reserve(columns.size());
    for (const auto c : columns) names.push_back(feature_names_.at(c));
    return DataMatrix(select_columns(values_, columns), std::move(names), sample_ids_);
}

DataMatrix DataMatrix::select_samples(std::span<const std::size_t> rows) const {
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (const auto r : rows) ids.push_back(sample_ids_.at(r));
    return DataMatrix(select_rows(values_, rows), feature_names_, std::move(ids));
}

LabelVector LabelVector::from_strings(const std::vector<std::string>& raw) {
    LabelVector out;
    const std::set<std::string> distinct(raw.begin(), raw.end());
    out.class_names.assign(distinct.begin(), distinct.end());
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < out.class_names.size(); ++i) {
        index.emplace(out.class_names[i], static_cast<int>(i));
    }
    out.labels.reserve(raw.size());
    for (const auto& r : raw) out.labels.push_back(index.at(r));
    return out;
}

LabelVector LabelVector::select(std::span<const std::size_t> rows) const {
    LabelVector out;
    out.class_names = class_names;
    out.labels.reserve(rows.size());
    for (const auto r : rows) out.labels.push_back(labels.at(r));
    return out;
}

std::vector<std::size_t> LabelVector::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (const int l : labels) ++counts.at(static_cast<std::size_t>(l));
    return counts;
}

Dataset::Dataset(DataMatrix m, LabelVector l) : matrix(std::move(m)), labels(std::move(l)) {
    if (labels.size() != matrix.n_samples()) {
        throw Error(ErrorCode::LengthMismatch, "label count does not match sample count");
    }
    for (const int v : labels.labels) {
        if (v < 0 || static_cast<std::size_t>(v) >= labels.class_count()) {
            throw Error(ErrorCode::InvalidArgument, "label index out of range");
        }
    }
}

Dataset Dataset::select_samples(std::span<const std::size_t> rows) const {
    return Dataset(matrix.select_samples(rows), labels.select(rows));
}

Dataset Dataset::select_features(std::span<const std::size_t> columns) const {
    return Dataset(matrix.select_features(columns), labels);
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "'" + path.string() + "' has no header row");
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto header = split_line(line, delim);

    const auto label_it = std::find(header.begin(), header.end(), options.label_column);
    if (label_it == header.end()) {
        throw Error(ErrorCode::MissingLabelColumn,
                    "label column '" + options.label_column + "' not found in header");
    }
    const auto label_col = static_cast<std::size_t>(label_it - header.begin());
    std::size_t id_col = header.size();
    if (!options.id_column.empty()) {
        const auto it = std::find(header.begin(), header.end(), options.id_column);
        if (it == header.end()) {
            throw Error(ErrorCode::InvalidArgument,
                        "id column '" + options.id_column + "' not found in header");
        }
        id_col = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::size_t> feature_cols;
    std::vector<std::string> feature_names;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == label_col || c == id_col) continue;
        feature_cols.push_back(c);
        feature_names.push_back(header[c]);
    }
    require_unique(feature_names, ErrorCode::DuplicateFeatureName, "feature name");

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::vector<std::string> ids;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        ++row;
        const auto cells = split_line(line, delim);
        if (cells.size() != header.size()) throw MalformedRowError(row, header.size(), cells.size());
        for (std::size_t j = 0; j < feature_cols.size(); ++j) {
            double v = 0.0;
            const auto& cell = cells[feature_cols[j]];
            if (!parse_finite(cell, v)) {
                throw Error(ErrorCode::NonNumericCell, "non-numeric cell '" + cell + "' at row " +
                                                           std::to_string(row) + ", column '" +
                                                           feature_names[j] + "'");
            }
            values.push_back(v);
        }
        raw_labels.push_back(cells[label_col]);
        ids.push_back(id_col < header.size() ? cells[id_col] : "row" + std::to_string(row));
    }

    auto labels = LabelVector::from_strings(raw_labels);
    if (labels.class_count() < 2) {
        throw Error(ErrorCode::SingleClass, "'" + path.string() + "' has fewer than 2 distinct labels");
    }
    Matrix m(raw_labels.size(), feature_names.size(), std::move(values));
    return Dataset(DataMatrix(std::move(m), std::move(feature_names), std::move(ids)),
                   std::move(labels));
}

void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   const std::string& label_column, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path.string() + "'");
    out << label_column;
    for (const auto& name : dataset.matrix.feature_names()) out << delimiter << name;
    out << '\n';
    const auto& values = dataset.matrix.values();
    for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
        out << dataset.labels.class_names[static_cast<std::size_t>(dataset.labels.labels[i])];
        for (const double v : values.row(i)) out << delimiter << format_real(v);
        out << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "failed writing '" + path.string() + "'");
}

DataMatrix log_transform(const DataMatrix& matrix) {
    Matrix values = matrix.values();
    for (std::size_t i = 0; i < values.rows(); ++i) {
        for (std::size_t j = 0; j < values.cols(); ++j) {
            const double x = values(i, j);
            if (x < 0.0) {
                throw NegativeValueError(matrix.feature_names()[j], matrix.sample_ids()[i], x);
            }
            values(i, j) = std::log2(x + 1.0);
        }
    }
    return DataMatrix(std::move(values), matrix.feature_names(), matrix.sample_ids());
}

StandardizationParams fit_standardization(const Matrix& train) {
    const std::size_t n = train.rows();
    const std::size_t p = train.cols();
    StandardizationParams params{std::vector<double>(p, 0.0), std::vector<double>(p, 0.0)};
    if (n == 0) return params;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train.row(i);
        for (std::size_t j = 0; j < p; ++j) params.means[j] += row[j];
    }
    for (auto& m : params.means) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = train.row(i);
        for (std::size_t j = 0; j < p; ++j) {
            const double d = row[j] - params.means[j];
            params.stds[j] += d * d;
        }
    }
    for (auto& s : params.stds) s = std::sqrt(s / static_cast<double>(n));
    return params;
}

Matrix apply_standardization(const Matrix& values, const StandardizationParams& params) {
    if (params.means.size() != values.cols() || params.stds.size() != values.cols()) {
        throw Error(ErrorCode::FeatureMismatch, "standardization parameters do not match column count");
    }
    Matrix out = values;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            row[j] = (row[j] - params.means[j]) / std::max(params.stds[j], kStdEpsilon);
        }
    }
    return out;
}

StandardizeResult standardize(const DataMatrix& train, const std::vector<DataMatrix>& others) {
    for (const auto& o : others) {
        if (o.feature_names() != train.feature_names()) {
            throw Error(ErrorCode::FeatureMismatch,
                        "matrices must share identical feature names in identical order");
        }
    }
    StandardizeResult result;
    result.params = fit_standardization(train.values());
    result.train = DataMatrix(apply_standardization(train.values(), result.params),
                              train.feature_names(), train.sample_ids());
    result.others.reserve(others.size());
    for (const auto& o : others) {
        result.others.emplace_back(apply_standardization(o.values(), result.params),
                                   o.feature_names(), o.sample_ids());
    }
    return result;
}

std::size_t stratified_test_count(std::size_t class_size, double test_fraction) {
    if (class_size == 0) return 0;
    const double target = std::floor(static_cast<double>(class_size) * test_fraction + 0.5);
    const auto count = static_cast<std::size_t>(std::max(target, 0.0));
    return std::min(count, class_size - 1);
}

SplitPair stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "test fraction must lie in (0, 1)");
    }
    const std::size_t k = dataset.labels.class_count();
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
        by_class[static_cast<std::size_t>(dataset.labels.labels[i])].push_back(i);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (by_class[c].size() == 1) {
            throw Error(ErrorCode::ClassTooSmall,
                        "class '" + dataset.labels.class_names[c] + "' has a single sample");
        }
    }

    Xoshiro256 rng(seed);
    std::vector<char> in_test(dataset.n_samples(), 0);
    for (auto& members : by_class) {
        const std::size_t take = stratified_test_count(members.size(), test_fraction);
        // Partial Fisher-Yates: the first `take` slots become the test draw.
        for (std::size_t i = 0; i < take; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.uniform_index(members.size() - i));
            std::swap(members[i], members[j]);
            in_test[members[i]] = 1;
        }
    }

    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t i = 0; i < dataset.n_samples(); ++i) {
        (in_test[i] ? test_rows : train_rows).push_back(i);
    }
    return SplitPair{dataset.select_samples(train_rows), dataset.select_samples(test_rows), seed};
}

std::pair<Dataset, Dataset> align_features(const Dataset& a, const Dataset& b) {
    const auto& names_a = a.matrix.feature_names();
    const auto& names_b = b.matrix.feature_names();
    std::unordered_map<std::string, std::size_t> position_in_b;
    position_in_b.reserve(names_b.size());
    for (std::size_t j = 0; j < names_b.size(); ++j) position_in_b.emplace(names_b[j], j);

    std::vector<std::size_t> order;
    order.reserve(names_a.size());
    std::size_t missing_in_b = 0;
    for (const auto& name : names_a) {
        const auto it = position_in_b.find(name);
        if (it == position_in_b.end()) {
            ++missing_in_b;
        } else {
            order.push_back(it->second);
        }
    }
    const std::size_t missing_in_a = names_b.size() - order.size();
    if (missing_in_a != 0 || missing_in_b != 0) throw FeatureSetMismatchError(missing_in_a, missing_in_b);

    if (std::is_sorted(order.begin(), order.end())) return {a, b};
    return {a, b.select_features(order)};
}

}  // namespace fsnull
