#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "lulc/io.hpp"
#include "lulc/rng.hpp"
#include "test_support.hpp"

using namespace lulc;
using namespace testsupport;

TEST_CASE("u8 data file is the identity byte sequence") {
    ScratchDir dir("io_u8");
    const auto g = grid_u8(2, 2, {1, 2, 3, 4});
    io::write_raster(g, dir.str("t"));
    const std::string bytes = slurp(dir.path() / "t.lrd");
    CHECK(bytes == std::string("\x01\x02\x03\x04", 4));
}

TEST_CASE("f32 1.0 encodes as IEEE-754 little endian") {
    ScratchDir dir("io_f32");
    const auto g = grid_f32(1, 1, 1, {1.0f});
    io::write_raster(g, dir.str("one"));
    const std::string bytes = slurp(dir.path() / "one.lrd");
    REQUIRE(bytes.size() == 4);
    CHECK(bytes == std::string("\x00\x00\x80\x3F", 4));
}

TEST_CASE("write then read returns an equal grid") {
    ScratchDir dir("io_roundtrip");
    auto gt = gt_10m();
    gt.origin_x = 500000.0;
    gt.origin_y = 2600000.0;
    const RasterGrid g(3, 2, 2, DataType::U16, gt, "EPSG:32640", 9999.0,
                       {"red", "nir"},
                       PixelBuffer(std::vector<std::uint16_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}));
    io::write_raster(g, dir.str("g"));
    const auto back = io::read_raster(dir.str("g"));
    CHECK(back == g);

    // .lrh / .lrd paths resolve to the same stem
    CHECK(io::read_raster(dir.path() / "g.lrh") == g);
    CHECK(io::read_raster(dir.path() / "g.lrd") == g);
}

TEST_CASE("header is canonical: sorted keys, LF, trailing newline") {
    ScratchDir dir("io_canonical");
    io::write_raster(grid_u8(1, 1, {1}), dir.str("c"));
    const std::string header = slurp(dir.path() / "c.lrh");
    CHECK(header.find("\r") == std::string::npos);
    CHECK(header.back() == '\n');
    const auto pos_band_count = header.find("\"band_count\"");
    const auto pos_band_names = header.find("\"band_names\"");
    const auto pos_crs = header.find("\"crs_id\"");
    const auto pos_width = header.find("\"width\"");
    REQUIRE(pos_band_count != std::string::npos);
    CHECK(pos_band_count < pos_band_names);
    CHECK(pos_band_names < pos_crs);
    CHECK(pos_crs < pos_width);
}

TEST_CASE("truncated data file is a corruption error") {
    ScratchDir dir("io_trunc");
    io::write_raster(grid_u8(2, 2, {1, 2, 3, 4}), dir.str("t"));
    std::ofstream(dir.path() / "t.lrd", std::ios::binary | std::ios::trunc) << "\x01\x02";
    CHECK_THROWS_AS(io::read_raster(dir.str("t")), CorruptionError);
}

TEST_CASE("unknown dtype and malformed headers are format errors") {
    ScratchDir dir("io_badheader");
    io::write_raster(grid_u8(1, 1, {1}), dir.str("b"));

    std::string header = slurp(dir.path() / "b.lrh");
    const auto pos = header.find("\"u8\"");
    REQUIRE(pos != std::string::npos);
    std::string f64_header = header;
    f64_header.replace(pos, 4, "\"f64\"");
    std::ofstream(dir.path() / "b.lrh", std::ios::binary | std::ios::trunc) << f64_header;
    CHECK_THROWS_AS(io::read_raster(dir.str("b")), FormatError);

    std::ofstream(dir.path() / "b.lrh", std::ios::binary | std::ios::trunc) << "{not json";
    CHECK_THROWS_AS(io::read_raster(dir.str("b")), FormatError);

    std::ofstream(dir.path() / "b.lrh", std::ios::binary | std::ios::trunc)
        << R"({"width": 1})" << '\n';
    CHECK_THROWS_AS(io::read_raster(dir.str("b")), FormatError);
}

TEST_CASE("missing files are io errors") {
    CHECK_THROWS_AS(io::read_raster("definitely/not/here"), IoError);
    CHECK_THROWS_AS(io::read_samples("nope.csv", ClassLegend::canonical()), IoError);
    CHECK_THROWS_AS(io::read_regions("nope.json"), IoError);
}

TEST_CASE("raster round trip is byte identical for random grids of all dtypes") {
    ScratchDir dir("io_prop");
    SplitMix64 rng(7);
    for (int trial = 0; trial < 120; ++trial) {
        const int w = 1 + static_cast<int>(rng.next_below(6));
        const int h = 1 + static_cast<int>(rng.next_below(6));
        const int bands = 1 + static_cast<int>(rng.next_below(3));
        const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                              static_cast<std::size_t>(bands);
        const DataType dt =
            (trial % 3 == 0) ? DataType::F32 : (trial % 3 == 1) ? DataType::U16 : DataType::U8;
        PixelBuffer buf;
        switch (dt) {
            case DataType::F32: {
                std::vector<float> v(n);
                for (auto& x : v) x = static_cast<float>((rng.next_double() - 0.5) * 1e4);
                buf = std::move(v);
                break;
            }
            case DataType::U16: {
                std::vector<std::uint16_t> v(n);
                for (auto& x : v) x = static_cast<std::uint16_t>(rng.next_below(65536));
                buf = std::move(v);
                break;
            }
            case DataType::U8: {
                std::vector<std::uint8_t> v(n);
                for (auto& x : v) x = static_cast<std::uint8_t>(rng.next_below(256));
                buf = std::move(v);
                break;
            }
        }
        const RasterGrid g(w, h, bands, dt, gt_10m(), "crs", {}, {}, std::move(buf));
        io::write_raster(g, dir.str("a"));
        const auto back = io::read_raster(dir.str("a"));
        io::write_raster(back, dir.str("b"));
        REQUIRE(slurp(dir.path() / "a.lrd") == slurp(dir.path() / "b.lrd"));
        REQUIRE(slurp(dir.path() / "a.lrh") == slurp(dir.path() / "b.lrh"));
    }
}

TEST_CASE("single sample row parses against the canonical legend") {
    ScratchDir dir("io_samples1");
    std::ofstream(dir.path() / "s.csv") << "x,y,class_id\n5.0,-5.0,1\n";
    const auto samples = io::read_samples(dir.str("s.csv"), ClassLegend::canonical());
    REQUIRE(samples.size() == 1);
    CHECK(samples[0] == LabeledSample{5.0, -5.0, 1});
}

TEST_CASE("unknown class id names the offending row") {
    ScratchDir dir("io_samples2");
    std::ofstream(dir.path() / "s.csv") << "x,y,class_id\n5.0,-5.0,9\n";
    CHECK_THROWS_WITH_AS(io::read_samples(dir.str("s.csv"), ClassLegend::canonical()),
                         doctest::Contains("line 2"), ValidationError);
}

TEST_CASE("non-numeric fields and bad headers are format errors") {
    ScratchDir dir("io_samples3");
    std::ofstream(dir.path() / "a.csv") << "x,y,class_id\nfoo,-5.0,1\n";
    CHECK_THROWS_AS(io::read_samples(dir.str("a.csv"), ClassLegend::canonical()), FormatError);
    std::ofstream(dir.path() / "b.csv") << "x,y,class_id\n5.0,-5.0,1.5\n";
    CHECK_THROWS_AS(io::read_samples(dir.str("b.csv"), ClassLegend::canonical()), FormatError);
    std::ofstream(dir.path() / "c.csv") << "lon,lat,class\n5.0,-5.0,1\n";
    CHECK_THROWS_AS(io::read_samples(dir.str("c.csv"), ClassLegend::canonical()), FormatError);
    std::ofstream(dir.path() / "d.csv") << "x,y,class_id\n5.0,-5.0\n";
    CHECK_THROWS_AS(io::read_samples(dir.str("d.csv"), ClassLegend::canonical()), FormatError);
}

TEST_CASE("600-row file yields 100 samples per class") {
    ScratchDir dir("io_samples4");
    {
        std::ofstream out(dir.path() / "s.csv");
        out << "x,y,class_id\n";
        for (int cls = 1; cls <= 6; ++cls)
            for (int i = 0; i < 100; ++i)
                out << (10.0 * i + 5.0) << ",-" << (10.0 * cls - 5.0) << ',' << cls << '\n';
    }
    const auto samples = io::read_samples(dir.str("s.csv"), ClassLegend::canonical());
    REQUIRE(samples.size() == 600);
    std::vector<int> counts(7, 0);
    for (const auto& s : samples) counts[static_cast<std::size_t>(s.class_id)]++;
    for (int cls = 1; cls <= 6; ++cls) CHECK(counts[static_cast<std::size_t>(cls)] == 100);
}

TEST_CASE("sample write/read round trip preserves exact coordinates") {
    ScratchDir dir("io_samples5");
    SplitMix64 rng(3);
    std::vector<LabeledSample> samples;
    for (int i = 0; i < 200; ++i)
        samples.push_back({(rng.next_double() - 0.5) * 1e7, (rng.next_double() - 0.5) * 1e7,
                           1 + static_cast<int>(rng.next_below(6))});
    io::write_samples(samples, dir.path() / "s.csv");
    const auto back = io::read_samples(dir.str("s.csv"), ClassLegend::canonical());
    CHECK(back == samples);
}

TEST_CASE("regions parse and validate") {
    ScratchDir dir("io_regions");
    std::ofstream(dir.path() / "r.json") << R"([
      {"region_id": "MCT", "name": "Muscat",
       "rings": [[[0,0],[100,0],[100,100],[0,100],[0,0]]]},
      {"region_id": "DHO", "name": "Dhofar",
       "rings": [[[200,0],[300,0],[300,100],[200,100],[200,0]]]}
    ])";
    const auto regions = io::read_regions(dir.str("r.json"));
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].name == "Muscat");
    CHECK(regions[1].name == "Dhofar");
    CHECK(regions[0].rings[0].size() == 5);

    std::ofstream(dir.path() / "open.json")
        << R"([{"region_id": "x", "name": "x", "rings": [[[0,0],[1,0],[1,1],[0,1]]]}])";
    CHECK_THROWS_AS(io::read_regions(dir.str("open.json")), ValidationError);

    std::ofstream(dir.path() / "empty.json") << R"([{"region_id": "x", "name": "x", "rings": []}])";
    CHECK_THROWS_AS(io::read_regions(dir.str("empty.json")), ValidationError);

    std::ofstream(dir.path() / "bad.json") << "[{]";
    CHECK_THROWS_AS(io::read_regions(dir.str("bad.json")), FormatError);
}

TEST_CASE("regions write/read round trip") {
    ScratchDir dir("io_regions_rt");
    std::vector<RegionPolygon> regions = {rect_region("A", 0, 0, 55.5, 70.25),
                                          rect_region("B", -10, -10, 0, 0)};
    io::write_regions(regions, dir.path() / "r.json");
    const auto back = io::read_regions(dir.str("r.json"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].rings == regions[0].rings);
    CHECK(back[1].region_id == "B");
}

TEST_CASE("legend io round trip and validation") {
    ScratchDir dir("io_legend");
    io::write_legend(ClassLegend::canonical(), dir.path() / "l.json");
    const auto back = io::read_legend(dir.str("l.json"));
    CHECK(back == ClassLegend::canonical());

    std::ofstream(dir.path() / "dup.json") << R"([{"id":1,"name":"A"},{"id":1,"name":"B"}])";
    CHECK_THROWS_AS(io::read_legend(dir.str("dup.json")), ValidationError);
    std::ofstream(dir.path() / "bad.json") << R"([{"id":"one","name":"A"}])";
    CHECK_THROWS_AS(io::read_legend(dir.str("bad.json")), FormatError);
}
