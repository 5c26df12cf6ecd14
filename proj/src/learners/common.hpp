#pragma once

#include <string>

#include "fsnull/error.hpp"
#include "fsnull/learners.hpp"

namespace fsnull::detail {

inline void check_training_input(const Matrix& X, const LabelVector& y, const char* learner) {
    if (X.rows() == 0 || y.size() == 0) {
        throw Error(ErrorCode::DegenerateInput, std::string(learner) + ": no training samples");
    }
    if (X.rows() != y.size()) {
        throw Error(ErrorCode::LengthMismatch,
                    std::string(learner) + ": label count does not match sample count");
    }
    if (X.cols() == 0) {
        throw Error(ErrorCode::DegenerateInput, std::string(learner) + ": no features");
    }
    if (y.class_count() < 2) {
        throw Error(ErrorCode::DegenerateInput, std::string(learner) + ": fewer than two classes");
    }
}

inline void check_predict_shape(std::size_t expected, const Matrix& X) {
    if (X.cols() != expected) {
        throw Error(ErrorCode::ShapeMismatch, "model expects " + std::to_string(expected) +
                                                  " feature(s), got " + std::to_string(X.cols()));
    }
}

}  // namespace fsnull::detail
