#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace optboost::detail {

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

std::optional<double> parse_double(std::string_view text);

// Splits one CSV line on commas. Surrounding whitespace and a single pair of
// double quotes are stripped from each cell.
std::vector<std::string> split_csv_line(std::string_view line);

std::string_view trim(std::string_view text);

}  // namespace optboost::detail
