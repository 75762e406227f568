#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lulc/raster.hpp"
#include "lulc/rng.hpp"
#include "test_support.hpp"

using namespace lulc;
using namespace testsupport;

TEST_CASE("dtype names and sizes") {
    CHECK(dtype_name(DataType::F32) == "f32");
    CHECK(dtype_name(DataType::U16) == "u16");
    CHECK(dtype_name(DataType::U8) == "u8");
    CHECK(dtype_size(DataType::F32) == 4);
    CHECK(dtype_size(DataType::U16) == 2);
    CHECK(dtype_size(DataType::U8) == 1);
    CHECK(dtype_from_name("u16") == DataType::U16);
    CHECK_FALSE(dtype_from_name("f64").has_value());
}

TEST_CASE("grid construction invariants") {
    CHECK_THROWS_AS(RasterGrid(0, 4, 1, DataType::U8, gt_10m(), "c"), ValidationError);
    CHECK_THROWS_AS(RasterGrid(4, 4, 0, DataType::U8, gt_10m(), "c"), ValidationError);
    GeoTransform flat = gt_10m();
    flat.pixel_height = 0.0;
    CHECK_THROWS_AS(RasterGrid(4, 4, 1, DataType::U8, flat, "c"), ValidationError);

    // buffer length must be width*height*band_count
    CHECK_THROWS_AS(grid_u8(3, 3, std::vector<std::uint8_t>(8, 0)), ValidationError);
    // buffer alternative must match dtype
    CHECK_THROWS_AS(RasterGrid(2, 2, 1, DataType::F32, gt_10m(), "c", {}, {"b"},
                               PixelBuffer(std::vector<std::uint8_t>(4, 0))),
                    ValidationError);

    const auto g = grid_u8(3, 2, std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6});
    CHECK(g.band_names() == std::vector<std::string>{"class"});
    CHECK(g.value(0, 2, 1) == 6.0);
    CHECK_THROWS_AS(g.value(0, 3, 0), lulc::IndexError);
    CHECK_THROWS_AS(g.value(1, 0, 0), lulc::IndexError);
}

TEST_CASE("pixel_to_map at the half-pixel center") {
    const auto g = grid_u8(100, 100, std::vector<std::uint8_t>(10000, 1));
    const auto p = g.pixel_to_map(0, 0);
    CHECK(p.x == 5.0);
    CHECK(p.y == -5.0);
}

TEST_CASE("pixel_to_map across the row and with an offset origin") {
    const auto g = grid_u8(100, 100, std::vector<std::uint8_t>(10000, 1));
    const auto p = g.pixel_to_map(99, 0);
    CHECK(p.x == 995.0);
    CHECK(p.y == -5.0);

    auto gt = gt_10m();
    gt.origin_x = 500000.0;
    gt.origin_y = 2600000.0;
    const auto g2 = grid_u8(10, 10, std::vector<std::uint8_t>(100, 1), 0.0, gt);
    const auto q = g2.pixel_to_map(0, 0);
    CHECK(q.x == 500005.0);
    CHECK(q.y == 2599995.0);

    CHECK_THROWS_AS(g.pixel_to_map(100, 0), lulc::IndexError);
    CHECK_THROWS_AS(g.pixel_to_map(0, -1), lulc::IndexError);
}

TEST_CASE("map_to_pixel floor semantics and out-of-raster signal") {
    const auto g = grid_u8(100, 100, std::vector<std::uint8_t>(10000, 1));
    CHECK(g.map_to_pixel(5.0, -5.0) == PixelIndex{0, 0});
    CHECK(g.map_to_pixel(9.999, -0.001) == PixelIndex{0, 0});
    CHECK_FALSE(g.map_to_pixel(-1.0, -5.0).has_value());
    CHECK_FALSE(g.map_to_pixel(1000.0, -5.0).has_value());
    CHECK(g.map_to_pixel(999.999, -999.999) == PixelIndex{99, 99});

    GeoTransform singular;
    singular.pixel_width = 2.0;
    singular.row_rot = 2.0;
    singular.col_rot = 3.0;
    singular.pixel_height = 3.0;
    const auto gs = grid_u8(4, 4, std::vector<std::uint8_t>(16, 1), 0.0, singular);
    CHECK_THROWS_AS(gs.map_to_pixel(1.0, 1.0), ConfigError);
}

TEST_CASE("pixel/map round trip is the identity for random geotransforms") {
    SplitMix64 rng(2024);
    int checked = 0;
    while (checked < 300) {
        GeoTransform gt;
        gt.origin_x = (rng.next_double() - 0.5) * 1e6;
        gt.origin_y = (rng.next_double() - 0.5) * 1e6;
        gt.pixel_width = (rng.next_double() - 0.5) * 40.0;
        gt.pixel_height = (rng.next_double() - 0.5) * 40.0;
        gt.row_rot = (rng.next_double() - 0.5) * 10.0;
        gt.col_rot = (rng.next_double() - 0.5) * 10.0;
        if (std::abs(gt.determinant()) < 1e-3 || gt.pixel_width == 0.0 || gt.pixel_height == 0.0)
            continue;
        const int w = 1 + static_cast<int>(rng.next_below(40));
        const int h = 1 + static_cast<int>(rng.next_below(40));
        const auto g = grid_u8(
            w, h,
            std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1),
            0.0, gt);
        const int col = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w)));
        const int row = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h)));
        const auto p = g.pixel_to_map(col, row);
        const auto back = g.map_to_pixel(p.x, p.y);
        REQUIRE(back.has_value());
        CHECK(*back == PixelIndex{col, row});
        ++checked;
    }
}

TEST_CASE("legend validation and canonical six classes") {
    const auto legend = ClassLegend::canonical();
    REQUIRE(legend.size() == 6);
    CHECK(legend.entries()[0] == std::pair<int, std::string>{1, "Water"});
    CHECK(legend.entries()[1] == std::pair<int, std::string>{2, "Trees"});
    CHECK(legend.entries()[2] == std::pair<int, std::string>{3, "Crops"});
    CHECK(legend.entries()[3] == std::pair<int, std::string>{4, "Built Area"});
    CHECK(legend.entries()[4] == std::pair<int, std::string>{5, "Bare Ground"});
    CHECK(legend.entries()[5] == std::pair<int, std::string>{6, "Rangeland"});
    CHECK(legend.id_of("Rangeland") == 6);
    CHECK(legend.name_of(4) == "Built Area");
    CHECK_THROWS_AS(legend.index_of(9), ValidationError);

    CHECK_THROWS_AS(ClassLegend({{1, "A"}, {1, "B"}}), ValidationError);
    CHECK_THROWS_AS(ClassLegend({{1, "A"}, {2, "A"}}), ValidationError);
    CHECK_THROWS_AS(ClassLegend({{0, "A"}}), ValidationError);
    CHECK_THROWS_AS(ClassLegend({{256, "A"}}), ValidationError);
    CHECK_THROWS_AS(ClassLegend({{1, ""}}), ValidationError);
}

TEST_CASE("class map enforces legend membership and reads back classes") {
    const ClassLegend legend({{1, "A"}, {2, "B"}});
    CHECK_THROWS_AS(ClassMap(grid_u8(2, 2, {1, 2, 7, 1}), legend), ValidationError);

    const ClassMap map(grid_u8(2, 2, {1, 2, 0, 1}), legend);  // 0 = nodata
    CHECK(map.class_at(0, 0) == 1);
    CHECK(map.class_at(1, 0) == 2);
    CHECK_FALSE(map.class_at(0, 1).has_value());
    CHECK(map.histogram() == std::vector<std::int64_t>{2, 1});

    CHECK_THROWS_AS(ClassMap(grid_f32(2, 2, 1, {1, 1, 1, 1}), legend), ValidationError);
}

TEST_CASE("rasterize covers the exact grid square") {
    const auto g = grid_u8(10, 10, std::vector<std::uint8_t>(100, 1), 0.0, gt_10m_y_up());
    const auto all = rasterize_polygon(rect_region("r", 0, 0, 100, 100), g);
    int n = 0;
    for (const auto m : all) n += m;
    CHECK(n == 100);

    const auto quarter = rasterize_polygon(rect_region("r", 0, 0, 50, 50), g);
    n = 0;
    for (const auto m : quarter) n += m;
    CHECK(n == 25);

    const auto outside = rasterize_polygon(rect_region("r", 2000, 2000, 3000, 3000), g);
    for (const auto m : outside) CHECK(m == 0);
}

TEST_CASE("rasterize rejects degenerate rings") {
    const auto g = grid_u8(4, 4, std::vector<std::uint8_t>(16, 1));
    RegionPolygon bad;
    bad.region_id = "bad";
    bad.name = "bad";
    bad.rings = {{{0, 0}, {10, 0}, {0, 0}}};
    CHECK_THROWS_AS(rasterize_polygon(bad, g), ValidationError);

    RegionPolygon open_ring;
    open_ring.region_id = "open";
    open_ring.name = "open";
    open_ring.rings = {{{0, 0}, {10, 0}, {10, 10}, {0, 10}}};
    CHECK_THROWS_AS(validate_region(open_ring), ValidationError);

    RegionPolygon empty;
    empty.region_id = "empty";
    empty.name = "empty";
    CHECK_THROWS_AS(validate_region(empty), ValidationError);
}

TEST_CASE("outer ring minus hole equals ring-with-hole, pixelwise") {
    const auto g = grid_u8(20, 20, std::vector<std::uint8_t>(400, 1), 0.0, gt_10m_y_up());
    const auto outer = rect_region("outer", 10, 10, 190, 190);
    const auto hole = rect_region("hole", 60, 60, 140, 140);

    RegionPolygon with_hole = outer;
    with_hole.rings.push_back(hole.rings[0]);

    const auto m_outer = rasterize_polygon(outer, g);
    const auto m_hole = rasterize_polygon(hole, g);
    const auto m_both = rasterize_polygon(with_hole, g);
    for (std::size_t i = 0; i < m_outer.size(); ++i)
        CHECK(static_cast<int>(m_both[i]) ==
              static_cast<int>(m_outer[i]) - static_cast<int>(m_hole[i]));
}

namespace {

// Independent convex point-in-polygon oracle: consistent cross-product signs
// against every edge of a CCW-ordered convex ring.
bool inside_convex(const std::vector<MapPoint>& ring, double x, double y) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
        const auto& a = ring[i];
        const auto& b = ring[i + 1];
        const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        if (cross < 0.0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("convex mask matches a brute-force center test") {
    SplitMix64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const int w = 16 + static_cast<int>(rng.next_below(48));
        const int h = 16 + static_cast<int>(rng.next_below(48));
        const auto g = grid_u8(
            w, h,
            std::vector<std::uint8_t>(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 1),
            0.0, gt_10m_y_up());

        // Random convex polygon: points on a circle, increasing angle (CCW).
        const double cx = rng.next_double() * w * 10.0;
        const double cy = rng.next_double() * h * 10.0;
        const double radius = 20.0 + rng.next_double() * 200.0;
        const int n_vertices = 4 + static_cast<int>(rng.next_below(8));
        std::vector<double> angles;
        for (int i = 0; i < n_vertices; ++i) angles.push_back(rng.next_double() * 6.283185307179586);
        std::sort(angles.begin(), angles.end());
        std::vector<MapPoint> ring;
        for (const double a : angles)
            ring.push_back({cx + radius * std::cos(a), cy + radius * std::sin(a)});
        ring.push_back(ring.front());

        RegionPolygon poly;
        poly.region_id = "convex";
        poly.name = "convex";
        poly.rings = {ring};

        const auto mask = rasterize_polygon(poly, g);
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const auto p = g.pixel_to_map(col, row);
                const bool expected = inside_convex(ring, p.x, p.y);
                const bool got =
                    mask[static_cast<std::size_t>(row) * static_cast<std::size_t>(w) +
                         static_cast<std::size_t>(col)] != 0;
                CHECK(got == expected);
            }
        }
    }
}

TEST_CASE("shared edges assign each center to exactly one region") {
    // Edge x=45 passes exactly through a column of pixel centers.
    const auto g = grid_u8(10, 10, std::vector<std::uint8_t>(100, 1), 0.0, gt_10m_y_up());
    const auto m_left = rasterize_polygon(rect_region("left", 0, 0, 45, 100), g);
    const auto m_right = rasterize_polygon(rect_region("right", 45, 0, 100, 100), g);
    const auto m_all = rasterize_polygon(rect_region("all", 0, 0, 100, 100), g);
    for (std::size_t i = 0; i < m_all.size(); ++i)
        CHECK(static_cast<int>(m_left[i]) + static_cast<int>(m_right[i]) ==
              static_cast<int>(m_all[i]));
}
