#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lulc/raster.hpp"

namespace lulc {

// Pixel counts of class transitions between two epochs; rows index the
// earlier map's class, columns the later map's, both in legend order.
// Pixels nodata in either epoch are excluded and counted separately.
struct TransitionMatrix {
    ClassLegend legend;
    std::vector<std::vector<std::int64_t>> counts;
    double pixel_area_m2 = 0.0;
    std::int64_t excluded_pixels = 0;

    std::int64_t grand_total() const;
    std::int64_t row_sum(std::size_t i) const;
    std::int64_t col_sum(std::size_t j) const;
    std::int64_t diagonal_sum() const;
};

TransitionMatrix transition_matrix(const ClassMap& earlier, const ClassMap& later);

// Area of one pixel from the geotransform step vectors, in square meters.
double pixel_area_m2(const RasterGrid& grid);

// Pixel count of class_id times the pixel area, in square kilometers.
double class_area_km2(const ClassMap& map, int class_id);

struct ZonalAreaRow {
    std::string region_id;
    std::string region_name;
    int year = 0;
    int class_id = 0;
    std::int64_t pixel_count = 0;
    double area_km2 = 0.0;
};

struct ZonalAreaTable {
    std::vector<ZonalAreaRow> rows;
    std::vector<std::string> warnings;
};

// Per-region per-class areas over rasterized polygon masks. Overlapping
// regions are each credited independently; a region rasterizing to zero
// pixels produces all-zero rows plus a warning, not an error. Regions are
// processed in parallel when workers > 1; row order is by input region.
ZonalAreaTable zonal_class_area(const ClassMap& map, const std::vector<RegionPolygon>& regions,
                                int year = 0, int workers = 1);

// 100 * (end - start) / start; nullopt when start == 0 (rendered "n/a").
std::optional<double> percent_change(double start_km2, double end_km2);

struct ChangeRow {
    std::string region_id;
    std::string region_name;
    int class_id = 0;
    std::string class_name;
    std::vector<double> area_by_year_km2;  // parallel to ChangeReport::years
    double baseline_km2 = 0.0;             // first year
    double delta_km2 = 0.0;                // last year minus first year
    std::optional<double> pct_change;      // first -> last, n/a on zero baseline
};

struct ChangeReport {
    std::vector<int> years;
    std::vector<ChangeRow> rows;
    std::vector<std::string> warnings;
};

// Per region x focus class area trajectory across the yearly maps. Years
// must be strictly increasing and all maps must share geometry and legend.
ChangeReport change_series(const std::vector<std::pair<int, ClassMap>>& maps,
                           const std::vector<RegionPolygon>& regions,
                           const std::vector<int>& focus_classes);

// CSV columns: region,class,area_<year>_km2...,delta_km2,pct_change,baseline_km2.
void write_change_report_csv(const ChangeReport& report, std::ostream& out);
void write_change_report_csv(const ChangeReport& report, const std::filesystem::path& path);
ChangeReport read_change_report_csv(const std::filesystem::path& path);

// CSV columns: region,year,class,pixel_count,area_km2.
void write_zonal_table_csv(const ZonalAreaTable& table, std::ostream& out);
void write_zonal_table_csv(const ZonalAreaTable& table, const std::filesystem::path& path);

}  // namespace lulc
