#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazeqa {

/// Shortest round-trip decimal representation, locale-independent.
std::string fmt_double(double v);

/// Locale-independent double parse of a whole token (leading/trailing
/// whitespace allowed). Empty on failure.
std::optional<double> parse_double(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_csv_row(std::string_view line);

}  // namespace gazeqa
