#include "lulc/raster.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace lulc {

std::string_view dtype_name(DataType dt) {
    switch (dt) {
        case DataType::F32: return "f32";
        case DataType::U16: return "u16";
        case DataType::U8: return "u8";
    }
    throw ConfigError("unknown dtype enum value");
}

std::size_t dtype_size(DataType dt) {
    switch (dt) {
        case DataType::F32: return 4;
        case DataType::U16: return 2;
        case DataType::U8: return 1;
    }
    throw ConfigError("unknown dtype enum value");
}

std::optional<DataType> dtype_from_name(std::string_view name) {
    if (name == "f32") return DataType::F32;
    if (name == "u16") return DataType::U16;
    if (name == "u8") return DataType::U8;
    return std::nullopt;
}

namespace {

PixelBuffer make_buffer(DataType dt, std::size_t n) {
    switch (dt) {
        case DataType::F32: return std::vector<float>(n, 0.0f);
        case DataType::U16: return std::vector<std::uint16_t>(n, 0);
        case DataType::U8: return std::vector<std::uint8_t>(n, 0);
    }
    throw ConfigError("unknown dtype enum value");
}

bool buffer_matches(DataType dt, const PixelBuffer& buf) {
    switch (dt) {
        case DataType::F32: return std::holds_alternative<std::vector<float>>(buf);
        case DataType::U16: return std::holds_alternative<std::vector<std::uint16_t>>(buf);
        case DataType::U8: return std::holds_alternative<std::vector<std::uint8_t>>(buf);
    }
    return false;
}

std::size_t buffer_length(const PixelBuffer& buf) {
    return std::visit([](const auto& v) { return v.size(); }, buf);
}

std::vector<std::string> default_band_names(int band_count) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(band_count));
    for (int b = 1; b <= band_count; ++b) names.push_back("band_" + std::to_string(b));
    return names;
}

void check_grid_params(int width, int height, int band_count, const GeoTransform& gt,
                       const std::optional<double>& nodata,
                       const std::vector<std::string>& band_names) {
    if (width <= 0 || height <= 0) throw ValidationError("raster width and height must be positive");
    if (band_count < 1) throw ValidationError("raster band_count must be >= 1");
    if (gt.pixel_width == 0.0 || gt.pixel_height == 0.0)
        throw ValidationError("geotransform pixel_width and pixel_height must be nonzero");
    if (nodata && !std::isfinite(*nodata)) throw ValidationError("nodata must be finite");
    if (band_names.size() != static_cast<std::size_t>(band_count))
        throw ValidationError("band_names length must equal band_count");
}

// Validates before any allocation happens and returns the sample count.
std::size_t checked_sample_count(int width, int height, int band_count, const GeoTransform& gt,
                                 const std::optional<double>& nodata,
                                 const std::vector<std::string>& band_names) {
    check_grid_params(width, height, band_count, gt, nodata, band_names);
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
           static_cast<std::size_t>(band_count);
}

}  // namespace

RasterGrid::RasterGrid(int width, int height, int band_count, DataType dtype, GeoTransform gt,
                       std::string crs_id, std::optional<double> nodata,
                       std::vector<std::string> band_names)
    : width_(width),
      height_(height),
      band_count_(band_count),
      dtype_(dtype),
      nodata_(nodata),
      gt_(gt),
      crs_id_(std::move(crs_id)),
      band_names_(band_names.empty() && band_count >= 1 ? default_band_names(band_count)
                                                        : std::move(band_names)),
      data_(make_buffer(dtype, checked_sample_count(width, height, band_count, gt_, nodata_,
                                                    band_names_))) {}

RasterGrid::RasterGrid(int width, int height, int band_count, DataType dtype, GeoTransform gt,
                       std::string crs_id, std::optional<double> nodata,
                       std::vector<std::string> band_names, PixelBuffer data)
    : width_(width),
      height_(height),
      band_count_(band_count),
      dtype_(dtype),
      nodata_(nodata),
      gt_(gt),
      crs_id_(std::move(crs_id)),
      band_names_(band_names.empty() && band_count >= 1 ? default_band_names(band_count)
                                                        : std::move(band_names)),
      data_(std::move(data)) {
    check_grid_params(width_, height_, band_count_, gt_, nodata_, band_names_);
    if (!buffer_matches(dtype_, data_))
        throw ValidationError("pixel buffer element type does not match dtype");
    if (buffer_length(data_) != sample_count())
        throw ValidationError("pixel buffer length must be width*height*band_count");
}

void RasterGrid::check_index(int band, int col, int row) const {
    if (band < 0 || band >= band_count_ || col < 0 || col >= width_ || row < 0 || row >= height_)
        throw IndexError("raster index out of bounds: band " + std::to_string(band) + ", col " +
                         std::to_string(col) + ", row " + std::to_string(row));
}

double RasterGrid::value(int band, int col, int row) const {
    check_index(band, col, row);
    const std::size_t i = offset(band, col, row);
    return std::visit([i](const auto& v) { return static_cast<double>(v[i]); }, data_);
}

void RasterGrid::set_value(int band, int col, int row, double v) {
    check_index(band, col, row);
    const std::size_t i = offset(band, col, row);
    std::visit(
        [i, v](auto& vec) {
            using T = typename std::decay_t<decltype(vec)>::value_type;
            vec[i] = static_cast<T>(v);
        },
        data_);
}

bool RasterGrid::pixel_valid(int col, int row) const {
    if (!nodata_) return true;
    for (int b = 0; b < band_count_; ++b) {
        if (value(b, col, row) == *nodata_) return false;
    }
    return true;
}

bool RasterGrid::same_geometry(const RasterGrid& other) const {
    return width_ == other.width_ && height_ == other.height_ && gt_ == other.gt_ &&
           crs_id_ == other.crs_id_;
}

MapPoint RasterGrid::pixel_to_map(int col, int row) const {
    if (col < 0 || col >= width_ || row < 0 || row >= height_)
        throw IndexError("pixel_to_map index out of bounds: col " + std::to_string(col) +
                         ", row " + std::to_string(row));
    const double c = static_cast<double>(col) + 0.5;
    const double r = static_cast<double>(row) + 0.5;
    return {gt_.origin_x + c * gt_.pixel_width + r * gt_.row_rot,
            gt_.origin_y + c * gt_.col_rot + r * gt_.pixel_height};
}

std::optional<PixelIndex> RasterGrid::map_to_pixel(double x, double y) const {
    const double det = gt_.determinant();
    if (det == 0.0) throw ConfigError("geotransform is singular, cannot invert");
    const double dx = x - gt_.origin_x;
    const double dy = y - gt_.origin_y;
    const double cf = (gt_.pixel_height * dx - gt_.row_rot * dy) / det;
    const double rf = (gt_.pixel_width * dy - gt_.col_rot * dx) / det;
    const double fc = std::floor(cf);
    const double fr = std::floor(rf);
    if (fc < 0.0 || fc >= static_cast<double>(width_) || fr < 0.0 ||
        fr >= static_cast<double>(height_))
        return std::nullopt;
    return PixelIndex{static_cast<int>(fc), static_cast<int>(fr)};
}

ClassLegend::ClassLegend(std::vector<std::pair<int, std::string>> entries)
    : entries_(std::move(entries)) {
    std::set<int> ids;
    std::set<std::string> names;
    for (const auto& [id, name] : entries_) {
        if (id < 1 || id > 255)
            throw ValidationError("legend class id " + std::to_string(id) +
                                  " outside [1, 255] (0 is reserved for nodata)");
        if (name.empty()) throw ValidationError("legend class names must be nonempty");
        if (!ids.insert(id).second)
            throw ValidationError("duplicate legend class id " + std::to_string(id));
        if (!names.insert(name).second)
            throw ValidationError("duplicate legend class name '" + name + "'");
    }
}

ClassLegend ClassLegend::canonical() {
    return ClassLegend({{1, "Water"},
                        {2, "Trees"},
                        {3, "Crops"},
                        {4, "Built Area"},
                        {5, "Bare Ground"},
                        {6, "Rangeland"}});
}

bool ClassLegend::contains(int id) const {
    return std::any_of(entries_.begin(), entries_.end(),
                       [id](const auto& e) { return e.first == id; });
}

std::size_t ClassLegend::index_of(int id) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].first == id) return i;
    }
    throw ValidationError("class id " + std::to_string(id) + " not present in legend");
}

const std::string& ClassLegend::name_of(int id) const { return entries_[index_of(id)].second; }

std::optional<int> ClassLegend::id_of(std::string_view name) const {
    for (const auto& [id, n] : entries_) {
        if (n == name) return id;
    }
    return std::nullopt;
}

ClassMap::ClassMap(RasterGrid grid, ClassLegend legend)
    : grid_(std::move(grid)), legend_(std::move(legend)) {
    if (grid_.band_count() != 1) throw ValidationError("class map must have exactly one band");
    if (grid_.dtype() != DataType::U8) throw ValidationError("class map dtype must be u8");
    const auto& cells = grid_.cells<std::uint8_t>();
    const auto& nodata = grid_.nodata();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const double v = static_cast<double>(cells[i]);
        if (nodata && v == *nodata) continue;
        if (!legend_.contains(cells[i]))
            throw ValidationError("class map pixel value " + std::to_string(cells[i]) +
                                  " not present in legend");
    }
}

std::optional<int> ClassMap::class_at(int col, int row) const {
    const double v = grid_.value(0, col, row);
    if (grid_.is_nodata_value(v)) return std::nullopt;
    return static_cast<int>(v);
}

std::vector<std::int64_t> ClassMap::histogram() const {
    std::vector<std::int64_t> counts(legend_.size(), 0);
    const auto& cells = grid_.cells<std::uint8_t>();
    const auto& nodata = grid_.nodata();
    for (const std::uint8_t c : cells) {
        if (nodata && static_cast<double>(c) == *nodata) continue;
        counts[legend_.index_of(c)] += 1;
    }
    return counts;
}

void validate_region(const RegionPolygon& poly) {
    if (poly.rings.empty())
        throw ValidationError("region '" + poly.region_id + "' has no rings");
    for (const auto& ring : poly.rings) {
        if (ring.size() < 4)
            throw ValidationError("region '" + poly.region_id +
                                  "' has a ring with fewer than 4 vertices");
        if (!(ring.front() == ring.back()))
            throw ValidationError("region '" + poly.region_id +
                                  "' has an open ring (first vertex != last)");
    }
}

bool point_in_polygon(const RegionPolygon& poly, double x, double y) {
    // Even-odd crossing count over all rings; holes cancel by parity. The
    // strict >/< comparisons give the half-open boundary rule.
    bool inside = false;
    for (const auto& ring : poly.rings) {
        const std::size_t n = ring.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const MapPoint& a = ring[j];
            const MapPoint& b = ring[i];
            if ((b.y > y) != (a.y > y)) {
                const double x_cross = b.x + (y - b.y) / (a.y - b.y) * (a.x - b.x);
                if (x < x_cross) inside = !inside;
            }
        }
    }
    return inside;
}

std::vector<std::uint8_t> rasterize_polygon(const RegionPolygon& poly,
                                            const RasterGrid& geometry_of) {
    validate_region(poly);
    const int w = geometry_of.width();
    const int h = geometry_of.height();
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const MapPoint p = geometry_of.pixel_to_map(col, row);
            if (point_in_polygon(poly, p.x, p.y))
                mask[static_cast<std::size_t>(row) * static_cast<std::size_t>(w) +
                     static_cast<std::size_t>(col)] = 1;
        }
    }
    return mask;
}

}  // namespace lulc
