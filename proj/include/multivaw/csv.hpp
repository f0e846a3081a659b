#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Minimal CSV helpers: comma separated, no quoting, '\n' or "\r\n" line ends.

namespace multivaw::csv {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Whole-cell parse; surrounding spaces are ignored. nullopt on failure.
std::optional<double> parse_double(std::string_view cell);

std::vector<std::string> split_line(std::string_view line);

}  // namespace multivaw::csv
