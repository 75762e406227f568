#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lulc/raster.hpp"

namespace lulc::io {

// Raster container: <stem>.lrh (canonical JSON header: sorted keys, UTF-8,
// LF) plus <stem>.lrd (raw little-endian band-sequential samples, row-major
// within each band, no padding). A path ending in .lrh/.lrd is accepted and
// reduced to its stem.
void write_raster(const RasterGrid& grid, const std::filesystem::path& path);
RasterGrid read_raster(const std::filesystem::path& path);

// Labeled-sample CSV with the exact header line "x,y,class_id". No quoting.
std::vector<LabeledSample> read_samples(const std::filesystem::path& path,
                                        const ClassLegend& legend);
void write_samples(const std::vector<LabeledSample>& samples, std::ostream& out);
void write_samples(const std::vector<LabeledSample>& samples, const std::filesystem::path& path);

// Region polygons: JSON array of {region_id, name, rings:[[[x,y],...],...]}.
std::vector<RegionPolygon> read_regions(const std::filesystem::path& path);
void write_regions(const std::vector<RegionPolygon>& regions, const std::filesystem::path& path);

// Legend: JSON array of {id, name}.
ClassLegend read_legend(const std::filesystem::path& path);
void write_legend(const ClassLegend& legend, const std::filesystem::path& path);

}  // namespace lulc::io
