#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace imbaug::data {

std::string_view trim(std::string_view s);
// Splits on commas; fields are trimmed and stripped of one pair of enclosing quotes.
std::vector<std::string_view> split_csv_line(std::string_view line);
std::optional<double> parse_double(std::string_view s);
// Shortest representation that reads back to the same double.
std::string format_double(double v);

}  // namespace imbaug::data
