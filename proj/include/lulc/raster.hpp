#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lulc/errors.hpp"

namespace lulc {

enum class DataType { F32, U16, U8 };

std::string_view dtype_name(DataType dt);
std::size_t dtype_size(DataType dt);
std::optional<DataType> dtype_from_name(std::string_view name);

// Six-coefficient affine mapping from pixel indices to map coordinates.
struct GeoTransform {
    double origin_x = 0.0;
    double pixel_width = 1.0;
    double row_rot = 0.0;
    double origin_y = 0.0;
    double col_rot = 0.0;
    double pixel_height = -1.0;

    double determinant() const { return pixel_width * pixel_height - row_rot * col_rot; }
    bool operator==(const GeoTransform&) const = default;
};

struct MapPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const MapPoint&) const = default;
};

struct PixelIndex {
    int col = 0;
    int row = 0;
    bool operator==(const PixelIndex&) const = default;
};

// A georeferenced point carrying a ground-truth class id.
struct LabeledSample {
    double x = 0.0;
    double y = 0.0;
    int class_id = 0;
    bool operator==(const LabeledSample&) const = default;
};

using PixelBuffer =
    std::variant<std::vector<float>, std::vector<std::uint16_t>, std::vector<std::uint8_t>>;

// Immutable multiband georeferenced pixel array, band-sequential in memory
// (band-major, row-major within each band). All bands share one geometry.
// Safe for concurrent reads once constructed.
class RasterGrid {
public:
    // Zero-filled grid. band_names defaults to "band_1".."band_N".
    RasterGrid(int width, int height, int band_count, DataType dtype, GeoTransform gt,
               std::string crs_id, std::optional<double> nodata = {},
               std::vector<std::string> band_names = {});

    // Takes ownership of an existing buffer; its alternative must match dtype
    // and its length must be width*height*band_count.
    RasterGrid(int width, int height, int band_count, DataType dtype, GeoTransform gt,
               std::string crs_id, std::optional<double> nodata,
               std::vector<std::string> band_names, PixelBuffer data);

    int width() const { return width_; }
    int height() const { return height_; }
    int band_count() const { return band_count_; }
    DataType dtype() const { return dtype_; }
    const std::optional<double>& nodata() const { return nodata_; }
    const GeoTransform& geotransform() const { return gt_; }
    const std::string& crs_id() const { return crs_id_; }
    const std::vector<std::string>& band_names() const { return band_names_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t sample_count() const { return pixel_count() * static_cast<std::size_t>(band_count_); }

    const PixelBuffer& buffer() const { return data_; }
    PixelBuffer& buffer() { return data_; }

    template <typename T>
    const std::vector<T>& cells() const { return std::get<std::vector<T>>(data_); }
    template <typename T>
    std::vector<T>& cells() { return std::get<std::vector<T>>(data_); }

    // Sample value widened to double. Bounds-checked.
    double value(int band, int col, int row) const;
    void set_value(int band, int col, int row, double v);

    bool is_nodata_value(double v) const { return nodata_ && v == *nodata_; }
    // A pixel is valid unless any of its band samples equals the nodata value.
    bool pixel_valid(int col, int row) const;

    // Same width/height/geotransform/crs (band layout not considered).
    bool same_geometry(const RasterGrid& other) const;

    // Map coordinates of the pixel center.
    MapPoint pixel_to_map(int col, int row) const;
    // Containing pixel under floor semantics; nullopt when outside the grid.
    // Throws ConfigError on a singular geotransform.
    std::optional<PixelIndex> map_to_pixel(double x, double y) const;

    bool operator==(const RasterGrid&) const = default;

    std::size_t offset(int band, int col, int row) const {
        return static_cast<std::size_t>(band) * pixel_count() +
               static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

private:
    void check_index(int band, int col, int row) const;

    int width_;
    int height_;
    int band_count_;
    DataType dtype_;
    std::optional<double> nodata_;
    GeoTransform gt_;
    std::string crs_id_;
    std::vector<std::string> band_names_;
    PixelBuffer data_;
};

// Ordered class id -> name table. Ids must be unique and in [1, 255]
// (0 is reserved as the class-map nodata value); names unique and nonempty.
class ClassLegend {
public:
    ClassLegend() = default;
    explicit ClassLegend(std::vector<std::pair<int, std::string>> entries);

    // Water, Trees, Crops, Built Area, Bare Ground, Rangeland (ids 1-6).
    static ClassLegend canonical();

    const std::vector<std::pair<int, std::string>>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool contains(int id) const;
    // Position of id within entries(); throws ValidationError when absent.
    std::size_t index_of(int id) const;
    const std::string& name_of(int id) const;
    std::optional<int> id_of(std::string_view name) const;

    bool operator==(const ClassLegend&) const = default;

private:
    std::vector<std::pair<int, std::string>> entries_;
};

// Single-band u8 categorical raster plus its legend. Every non-nodata pixel
// value must appear in the legend (checked at construction).
class ClassMap {
public:
    ClassMap(RasterGrid grid, ClassLegend legend);

    const RasterGrid& grid() const { return grid_; }
    const ClassLegend& legend() const { return legend_; }

    // Class id at (col,row); nullopt for nodata pixels.
    std::optional<int> class_at(int col, int row) const;
    // Pixel counts in legend order.
    std::vector<std::int64_t> histogram() const;

    bool operator==(const ClassMap&) const = default;

private:
    RasterGrid grid_;
    ClassLegend legend_;
};

// Polygonal region in the raster's CRS; outer ring first, optional holes.
// Rings must be closed (first vertex == last) with at least 4 vertices.
struct RegionPolygon {
    std::string region_id;
    std::string name;
    std::vector<std::vector<MapPoint>> rings;
};

void validate_region(const RegionPolygon& poly);

// width*height row-major mask, 1 where the pixel center lies inside the
// polygon under the even-odd rule. Boundary centers resolve by the half-open
// crossing convention (strict comparisons in the crossing test), so a center
// on a shared edge belongs to exactly one of two adjacent polygons.
std::vector<std::uint8_t> rasterize_polygon(const RegionPolygon& poly,
                                            const RasterGrid& geometry_of);

// Even-odd point-in-polygon test used by rasterize_polygon.
bool point_in_polygon(const RegionPolygon& poly, double x, double y);

}  // namespace lulc
