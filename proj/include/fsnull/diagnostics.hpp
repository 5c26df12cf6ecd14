#pragma once

#include <cstddef>
#include <vector>

#include "fsnull/matrix.hpp"

namespace fsnull {

struct PcaResult {
    Matrix projection;  // n_samples x d
    /// Variance captured by each component over the total variance;
    /// non-increasing.
    std::vector<double> explained_variance_ratio;
    /// Sample-covariance eigenvalues (divisor n - 1).
    std::vector<double> eigenvalues;
    Matrix components;  // d x n_features, orthonormal rows
    double total_variance = 0.0;
    /// Set when fewer than the requested components carry variance; the
    /// result then holds only the components that do.
    bool rank_deficient = false;

    std::size_t dimensions() const noexcept { return components.rows(); }
};

struct PcaOptions {
    std::size_t max_iterations = 10000;
    double relative_tolerance = 1e-9;  // on the eigen-equation residual
};

/// Top-d principal components of the column-centred data. Each component
/// comes from power iteration on the smaller of the n x n Gram and p x p
/// covariance operators, deflated against the components already found.
/// Signs are fixed so the largest-magnitude coordinate is positive.
PcaResult pca_project(const Matrix& X, std::size_t d, const PcaOptions& options = {});

}  // namespace fsnull
