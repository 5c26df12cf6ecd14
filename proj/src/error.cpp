#include "fsnull/error.hpp"

#include <sstream>

namespace fsnull {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingFile: return "MissingFile";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::NonNumericCell: return "NonNumericCell";
        case ErrorCode::DuplicateFeatureName: return "DuplicateFeatureName";
        case ErrorCode::DuplicateSampleId: return "DuplicateSampleId";
        case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::InvalidMatrix: return "InvalidMatrix";
        case ErrorCode::NegativeValue: return "NegativeValue";
        case ErrorCode::FeatureMismatch: return "FeatureMismatch";
        case ErrorCode::ClassTooSmall: return "ClassTooSmall";
        case ErrorCode::FeatureSetMismatch: return "FeatureSetMismatch";
        case ErrorCode::SizeExceedsFeatures: return "SizeExceedsFeatures";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::SingleClassPresent: return "SingleClassPresent";
        case ErrorCode::EmptyGroup: return "EmptyGroup";
        case ErrorCode::EmptySummaries: return "EmptySummaries";
        case ErrorCode::UnknownFeatureNames: return "UnknownFeatureNames";
        case ErrorCode::RankDeficient: return "RankDeficient";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::NeedTwoComponents: return "NeedTwoComponents";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

namespace {

std::string malformed_message(std::size_t row, std::size_t expected, std::size_t actual) {
    std::ostringstream os;
    os << "malformed row " << row << ": expected " << expected << " cells, found " << actual;
    return os.str();
}

std::string unknown_names_message(const std::vector<std::string>& names) {
    std::ostringstream os;
    os << names.size() << " unknown feature name(s):";
    for (const auto& n : names) os << ' ' << n;
    return os.str();
}

}  // namespace

MalformedRowError::MalformedRowError(std::size_t row, std::size_t expected, std::size_t actual)
    : Error(ErrorCode::MalformedRow, malformed_message(row, expected, actual)), row_(row) {}

NegativeValueError::NegativeValueError(std::string feature, std::string sample, double value)
    : Error(ErrorCode::NegativeValue,
            "negative value " + std::to_string(value) + " at feature '" + feature + "', sample '" +
                sample + "' cannot be log-transformed"),
      feature_(std::move(feature)),
      sample_(std::move(sample)) {}

FeatureSetMismatchError::FeatureSetMismatchError(std::size_t missing_in_first,
                                                 std::size_t missing_in_second)
    : Error(ErrorCode::FeatureSetMismatch,
            "feature sets differ: " + std::to_string(missing_in_first) +
                " name(s) missing from the first dataset, " + std::to_string(missing_in_second) +
                " missing from the second"),
      missing_in_first_(missing_in_first),
      missing_in_second_(missing_in_second) {}

UnknownFeatureNamesError::UnknownFeatureNamesError(std::vector<std::string> names)
    : Error(ErrorCode::UnknownFeatureNames, unknown_names_message(names)),
      names_(std::move(names)) {}

}  // namespace fsnull
