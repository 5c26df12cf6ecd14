#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fsnull/matrix.hpp"

namespace fsnull {

/// Samples x features matrix with unique feature names and sample ids.
/// Entries are always finite; the constructor enforces every invariant.
class DataMatrix {
public:
    DataMatrix() = default;
    DataMatrix(Matrix values, std::vector<std::string> feature_names,
               std::vector<std::string> sample_ids);

    const Matrix& values() const noexcept { return values_; }
    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<std::string>& sample_ids() const noexcept { return sample_ids_; }

    std::size_t n_samples() const noexcept { return values_.rows(); }
    std::size_t n_features() const noexcept { return values_.cols(); }

    DataMatrix select_features(std::span<const std::size_t> columns) const;
    DataMatrix select_samples(std::span<const std::size_t> rows) const;

    friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

private:
    Matrix values_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> sample_ids_;
};

/// Class indices plus the sorted class names they refer to.
struct LabelVector {
    std::vector<int> labels;
    std::vector<std::string> class_names;

    std::size_t size() const noexcept { return labels.size(); }
    std::size_t class_count() const noexcept { return class_names.size(); }

    /// Builds indices from raw label strings; names are sorted so the
    /// assignment does not depend on row order.
    static LabelVector from_strings(const std::vector<std::string>& raw);

    LabelVector select(std::span<const std::size_t> rows) const;
    std::vector<std::size_t> class_counts() const;

    friend bool operator==(const LabelVector&, const LabelVector&) = default;
};

struct Dataset {
    DataMatrix matrix;
    LabelVector labels;

    Dataset() = default;
    Dataset(DataMatrix m, LabelVector l);

    std::size_t n_samples() const noexcept { return matrix.n_samples(); }
    std::size_t n_features() const noexcept { return matrix.n_features(); }

    Dataset select_samples(std::span<const std::size_t> rows) const;
    Dataset select_features(std::span<const std::size_t> columns) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct StandardizationParams {
    std::vector<double> means;
    std::vector<double> stds;
};

struct SplitPair {
    Dataset train;
    Dataset test;
    std::uint64_t seed = 0;
};

struct LoadOptions {
    std::string label_column = "label";
    /// Optional column holding sample ids; rows are named "row<N>" otherwise.
    std::string id_column;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// Writes `dataset` in the format `load_dataset` reads, reals with 17
/// significant digits so the values round-trip exactly.
void write_dataset(const std::filesystem::path& path, const Dataset& dataset,
                   const std::string& label_column = "label", char delimiter = ',');

/// Replaces every entry x with log2(x + 1).
DataMatrix log_transform(const DataMatrix& matrix);

inline constexpr double kStdEpsilon = 1e-12;

struct StandardizeResult {
    DataMatrix train;
    std::vector<DataMatrix> others;
    StandardizationParams params;
};

/// Z-scores `train` with its own per-feature mean and population std and
/// applies the same parameters to every matrix in `others`.
StandardizeResult standardize(const DataMatrix& train, const std::vector<DataMatrix>& others = {});

StandardizationParams fit_standardization(const Matrix& train);
Matrix apply_standardization(const Matrix& values, const StandardizationParams& params);

/// Per class c, round(n_c * test_fraction) samples (half up, clamped to
/// [0, n_c - 1]) go to the test side. Row order is preserved on both sides.
SplitPair stratified_split(const Dataset& dataset, double test_fraction, std::uint64_t seed);

std::size_t stratified_test_count(std::size_t class_size, double test_fraction);

/// Reorders the columns of `b` to match the feature order of `a`.
std::pair<Dataset, Dataset> align_features(const Dataset& a, const Dataset& b);

}  // namespace fsnull
