#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lulc/errors.hpp"

namespace lulc {

struct ChartSeries {
    std::string label;
    std::vector<std::optional<double>> values;  // nullopt renders as "n/a"
};

// One grouped bar chart: categories along x, one or two value series. The
// canvas is fixed at 960x540 with named font families and two-decimal axis
// labels so identical specs serialize to identical bytes.
struct ChartSpec {
    std::string title;
    std::vector<std::string> categories;
    std::vector<ChartSeries> series;  // 1 or 2
    std::string unit;                 // e.g. "km²" or "%"
    bool sort_descending = false;     // by first-series value; n/a sorts last
};

std::string render_bar_chart(const ChartSpec& spec);
void emit_bar_chart(const ChartSpec& spec, const std::filesystem::path& path);

}  // namespace lulc
