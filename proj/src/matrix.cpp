#include "fsnull/matrix.hpp"

#include <algorithm>

#include "fsnull/error.hpp"

namespace fsnull {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorCode::ShapeMismatch, "matrix buffer size does not match its shape");
    }
}

Matrix select_columns(const Matrix& m, std::span<const std::size_t> columns) {
    Matrix out(m.rows(), columns.size());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto src = m.row(r);
        auto dst = out.row(r);
        for (std::size_t j = 0; j < columns.size(); ++j) {
            if (columns[j] >= m.cols()) {
                throw Error(ErrorCode::ShapeMismatch, "column index out of range");
            }
            dst[j] = src[columns[j]];
        }
    }
    return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= m.rows()) throw Error(ErrorCode::ShapeMismatch, "row index out of range");
        const auto src = m.row(rows[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

}  // namespace fsnull
