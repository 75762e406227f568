#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lulc {

// Shortest round-trip decimal form (std::to_chars); deterministic and
// lossless back through parse_double.
std::string format_double(double v);
// Fixed two-decimal form for chart labels and geometry.
std::string format_fixed2(double v);

std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

// Split on ',' with no quoting; trailing '\r' on the line is stripped.
std::vector<std::string_view> split_csv_line(std::string_view line);

}  // namespace lulc
