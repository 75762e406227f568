#include "lulc/chart.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "lulc/text.hpp"

namespace lulc {

namespace {

// Fixed canvas; every coordinate is emitted with two decimals so a spec maps
// to exactly one byte sequence.
constexpr double kWidth = 960.0;
constexpr double kHeight = 540.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 930.0;
constexpr double kTop = 60.0;
constexpr double kBottom = 440.0;

const char* kSeriesColors[2] = {"#4e79a7", "#f28e2b"};

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void validate_spec(const ChartSpec& spec) {
    if (spec.categories.empty()) throw ValidationError("chart needs at least one category");
    if (spec.series.empty() || spec.series.size() > 2)
        throw ValidationError("chart needs one or two series");
    for (const auto& s : spec.series) {
        if (s.values.size() != spec.categories.size())
            throw ValidationError("chart series '" + s.label +
                                  "' length does not match category count");
        for (const auto& v : s.values)
            if (v && !std::isfinite(*v))
                throw ValidationError("chart values must be finite or n/a");
    }
}

}  // namespace

std::string render_bar_chart(const ChartSpec& spec) {
    validate_spec(spec);

    // Category display order; stable sort keeps equal values in input order.
    std::vector<std::size_t> order(spec.categories.size());
    std::iota(order.begin(), order.end(), 0);
    if (spec.sort_descending) {
        const auto& first = spec.series[0].values;
        std::stable_sort(order.begin(), order.end(), [&first](std::size_t a, std::size_t b) {
            if (first[a].has_value() != first[b].has_value()) return first[a].has_value();
            if (!first[a]) return false;
            return *first[a] > *first[b];
        });
    }

    double vmin = 0.0;
    double vmax = 0.0;
    bool any_na = false;
    for (const auto& s : spec.series) {
        for (const auto& v : s.values) {
            if (!v) {
                any_na = true;
                continue;
            }
            vmin = std::min(vmin, *v);
            vmax = std::max(vmax, *v);
        }
    }
    if (vmax == vmin) vmax = vmin + 1.0;  // all-zero / all-n/a chart still renders

    const double plot_h = kBottom - kTop;
    const double plot_w = kRight - kLeft;
    const auto y_of = [&](double v) { return kBottom - (v - vmin) / (vmax - vmin) * plot_h; };
    const double y_zero = y_of(0.0);

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << format_fixed2(kWidth)
        << "\" height=\"" << format_fixed2(kHeight) << "\" viewBox=\"0 0 "
        << format_fixed2(kWidth) << " " << format_fixed2(kHeight) << "\">\n";
    if (any_na) {
        svg << "  <defs>\n"
               "    <pattern id=\"hatch\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\" "
               "patternUnits=\"userSpaceOnUse\">\n"
               "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888888\" stroke-width=\"2\"/>\n"
               "    </pattern>\n"
               "  </defs>\n";
    }
    svg << "  <rect x=\"0\" y=\"0\" width=\"" << format_fixed2(kWidth) << "\" height=\""
        << format_fixed2(kHeight) << "\" fill=\"#ffffff\"/>\n";
    svg << "  <text x=\"" << format_fixed2(kWidth / 2.0)
        << "\" y=\"30.00\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
           "font-size=\"18\" font-weight=\"bold\">"
        << xml_escape(spec.title) << "</text>\n";
    svg << "  <text x=\"" << format_fixed2(kLeft)
        << "\" y=\"50.00\" text-anchor=\"start\" font-family=\"Helvetica, Arial, sans-serif\" "
           "font-size=\"12\" fill=\"#333333\">"
        << xml_escape(spec.unit) << "</text>\n";

    // Gridlines and two-decimal tick labels, five even divisions.
    for (int t = 0; t <= 5; ++t) {
        const double v = vmin + (vmax - vmin) * static_cast<double>(t) / 5.0;
        const double y = y_of(v);
        svg << "  <line x1=\"" << format_fixed2(kLeft) << "\" y1=\"" << format_fixed2(y)
            << "\" x2=\"" << format_fixed2(kRight) << "\" y2=\"" << format_fixed2(y)
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg << "  <text x=\"" << format_fixed2(kLeft - 8.0) << "\" y=\""
            << format_fixed2(y + 4.0)
            << "\" text-anchor=\"end\" font-family=\"Helvetica, Arial, sans-serif\" "
               "font-size=\"11\" fill=\"#333333\">"
            << format_fixed2(v) << "</text>\n";
    }

    const std::size_t n_cat = spec.categories.size();
    const std::size_t n_series = spec.series.size();
    const double slot = plot_w / static_cast<double>(n_cat);
    const double group_w = slot * 0.72;
    const double bar_w = group_w / static_cast<double>(n_series);

    for (std::size_t pos = 0; pos < n_cat; ++pos) {
        const std::size_t ci = order[pos];
        const double x0 = kLeft + slot * static_cast<double>(pos) + (slot - group_w) / 2.0;
        for (std::size_t si = 0; si < n_series; ++si) {
            const double bx = x0 + bar_w * static_cast<double>(si);
            const auto& v = spec.series[si].values[ci];
            if (v) {
                const double yv = y_of(*v);
                const double top = std::min(yv, y_zero);
                const double height = std::abs(yv - y_zero);
                svg << "  <rect class=\"bar\" x=\"" << format_fixed2(bx) << "\" y=\""
                    << format_fixed2(top) << "\" width=\"" << format_fixed2(bar_w)
                    << "\" height=\"" << format_fixed2(height) << "\" fill=\""
                    << kSeriesColors[si] << "\"/>\n";
                svg << "  <text x=\"" << format_fixed2(bx + bar_w / 2.0) << "\" y=\""
                    << format_fixed2(top - 4.0)
                    << "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
                       "font-size=\"10\" fill=\"#333333\">"
                    << format_fixed2(*v) << "</text>\n";
            } else {
                svg << "  <rect class=\"bar-na\" x=\"" << format_fixed2(bx) << "\" y=\""
                    << format_fixed2(y_zero - 14.0) << "\" width=\"" << format_fixed2(bar_w)
                    << "\" height=\"14.00\" fill=\"url(#hatch)\" stroke=\"#888888\" "
                       "stroke-width=\"1\"/>\n";
                svg << "  <text x=\"" << format_fixed2(bx + bar_w / 2.0) << "\" y=\""
                    << format_fixed2(y_zero - 18.0)
                    << "\" text-anchor=\"middle\" font-family=\"Helvetica, Arial, sans-serif\" "
                       "font-size=\"10\" fill=\"#888888\">n/a</text>\n";
            }
        }
        const double label_x = kLeft + slot * (static_cast<double>(pos) + 0.5);
        svg << "  <text x=\"" << format_fixed2(label_x) << "\" y=\""
            << format_fixed2(kBottom + 16.0)
            << "\" text-anchor=\"end\" font-family=\"Helvetica, Arial, sans-serif\" "
               "font-size=\"11\" fill=\"#333333\" transform=\"rotate(-30 "
            << format_fixed2(label_x) << " " << format_fixed2(kBottom + 16.0) << ")\">"
            << xml_escape(spec.categories[ci]) << "</text>\n";
    }

    // Zero baseline on top of the bars.
    svg << "  <line x1=\"" << format_fixed2(kLeft) << "\" y1=\"" << format_fixed2(y_zero)
        << "\" x2=\"" << format_fixed2(kRight) << "\" y2=\"" << format_fixed2(y_zero)
        << "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    if (n_series > 1 || !spec.series[0].label.empty()) {
        double lx = kLeft + 4.0;
        for (std::size_t si = 0; si < n_series; ++si) {
            svg << "  <rect x=\"" << format_fixed2(lx) << "\" y=\"66.00\" width=\"12.00\" "
                   "height=\"12.00\" fill=\""
                << kSeriesColors[si] << "\"/>\n";
            svg << "  <text x=\"" << format_fixed2(lx + 16.0)
                << "\" y=\"76.00\" text-anchor=\"start\" "
                   "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"11\" "
                   "fill=\"#333333\">"
                << xml_escape(spec.series[si].label) << "</text>\n";
            lx += 18.0 + 7.0 * static_cast<double>(spec.series[si].label.size()) + 16.0;
        }
    }

    if (any_na) {
        svg << "  <text x=\"" << format_fixed2(kLeft) << "\" y=\""
            << format_fixed2(kHeight - 12.0)
            << "\" text-anchor=\"start\" font-family=\"Helvetica, Arial, sans-serif\" "
               "font-size=\"11\" fill=\"#888888\">hatched bars: n/a (undefined for a zero "
               "baseline)</text>\n";
    }

    svg << "</svg>\n";
    return std::move(svg).str();
}

void emit_bar_chart(const ChartSpec& spec, const std::filesystem::path& path) {
    const std::string svg = render_bar_chart(spec);
    const auto parent = path.parent_path();
    if (!parent.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(parent, ec);
        if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace lulc
