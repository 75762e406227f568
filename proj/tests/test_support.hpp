#pragma once

// Shared helpers for the test binaries: small grid builders, scratch
// directories, file hashing and independent reference implementations used
// as oracles against the library code.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lulc/raster.hpp"
#include "lulc/rng.hpp"

namespace testsupport {

// North-up grid: origin (0,0), 10 m cells, y decreasing southward.
inline lulc::GeoTransform gt_10m() {
    lulc::GeoTransform gt;
    gt.origin_x = 0.0;
    gt.pixel_width = 10.0;
    gt.row_rot = 0.0;
    gt.origin_y = 0.0;
    gt.col_rot = 0.0;
    gt.pixel_height = -10.0;
    return gt;
}

// Same cell size with y increasing northward; map square [0,S]x[0,S] then
// covers the grid exactly.
inline lulc::GeoTransform gt_10m_y_up() {
    auto gt = gt_10m();
    gt.pixel_height = 10.0;
    return gt;
}

inline lulc::RasterGrid grid_f32(int w, int h, int bands, std::vector<float> cells,
                                 std::optional<double> nodata = {},
                                 lulc::GeoTransform gt = gt_10m()) {
    return lulc::RasterGrid(w, h, bands, lulc::DataType::F32, gt, "EPSG:32640", nodata, {},
                            std::move(cells));
}

inline lulc::RasterGrid grid_u8(int w, int h, std::vector<std::uint8_t> cells,
                                std::optional<double> nodata = 0.0,
                                lulc::GeoTransform gt = gt_10m()) {
    return lulc::RasterGrid(w, h, 1, lulc::DataType::U8, gt, "EPSG:32640", nodata, {"class"},
                            std::move(cells));
}

inline lulc::RegionPolygon rect_region(std::string id, double x0, double y0, double x1,
                                       double y1) {
    lulc::RegionPolygon poly;
    poly.region_id = id;
    poly.name = std::move(id);
    poly.rings = {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}};
    return poly;
}

// Fresh per-test scratch directory under the build tree cwd.
class ScratchDir {
public:
    explicit ScratchDir(const std::string& name)
        : path_(std::filesystem::current_path() / ("scratch_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& leaf) const { return (path_ / leaf).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const char c : bytes) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::uint64_t file_hash(const std::filesystem::path& path) { return fnv1a(slurp(path)); }

// Independent dense linear-algebra oracle (Gauss-Jordan with partial
// pivoting), deliberately separate from the Cholesky path under test.
inline std::vector<std::vector<double>> invert_dense(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

inline double determinant_dense(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    double det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        if (pivot != col) {
            std::swap(a[col], a[pivot]);
            det = -det;
        }
        det *= a[col][col];
        if (a[col][col] == 0.0) return 0.0;
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    return det;
}

}  // namespace testsupport
