#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fsnull {

enum class ErrorCode {
    MissingFile,
    MalformedRow,
    NonNumericCell,
    DuplicateFeatureName,
    DuplicateSampleId,
    MissingLabelColumn,
    SingleClass,
    InvalidMatrix,
    NegativeValue,
    FeatureMismatch,
    ClassTooSmall,
    FeatureSetMismatch,
    SizeExceedsFeatures,
    InvalidArgument,
    DegenerateInput,
    ShapeMismatch,
    LengthMismatch,
    SingleClassPresent,
    EmptyGroup,
    EmptySummaries,
    UnknownFeatureNames,
    RankDeficient,
    IoError,
    NeedTwoComponents,
    ParseError,
};

const char* to_string(ErrorCode code) noexcept;

/// Base of every error raised by the library. `code()` identifies the
/// failure class; the message carries the human-readable details.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// A data row with the wrong number of cells. Rows are numbered from 1,
/// not counting the header.
class MalformedRowError : public Error {
public:
    MalformedRowError(std::size_t row, std::size_t expected, std::size_t actual);

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class NegativeValueError : public Error {
public:
    NegativeValueError(std::string feature, std::string sample, double value);

    const std::string& feature() const noexcept { return feature_; }
    const std::string& sample() const noexcept { return sample_; }

private:
    std::string feature_;
    std::string sample_;
};

class FeatureSetMismatchError : public Error {
public:
    FeatureSetMismatchError(std::size_t missing_in_first, std::size_t missing_in_second);

    /// Names present in the second dataset but absent from the first.
    std::size_t missing_in_first() const noexcept { return missing_in_first_; }
    /// Names present in the first dataset but absent from the second.
    std::size_t missing_in_second() const noexcept { return missing_in_second_; }

private:
    std::size_t missing_in_first_;
    std::size_t missing_in_second_;
};

class UnknownFeatureNamesError : public Error {
public:
    explicit UnknownFeatureNamesError(std::vector<std::string> names);

    const std::vector<std::string>& names() const noexcept { return names_; }

private:
    std::vector<std::string> names_;
};

}  // namespace fsnull
