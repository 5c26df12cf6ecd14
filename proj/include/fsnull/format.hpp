#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace fsnull {

/// Shortest-safe text for a double: 17 significant digits, which always
/// parses back to the identical value.
std::string format_real(double value);

/// Parses a whole field as a double; nullopt on any trailing junk.
std::optional<double> parse_real(std::string_view text);

}  // namespace fsnull
