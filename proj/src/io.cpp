#include "lulc/io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lulc/text.hpp"

namespace lulc::io {

namespace {

using nlohmann::json;

std::filesystem::path stem_of(const std::filesystem::path& path) {
    const auto ext = path.extension();
    if (ext == ".lrh" || ext == ".lrd") {
        auto p = path;
        p.replace_extension();
        return p;
    }
    return path;
}

void ensure_parent_dir(const std::filesystem::path& path) {
    const auto parent = path.parent_path();
    if (parent.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(parent, ec);
    if (ec) throw IoError("cannot create directory " + parent.string() + ": " + ec.message());
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    ensure_parent_dir(path);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path.string());
    return std::move(buf).str();
}

void append_le16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void append_le32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

std::string encode_samples(const RasterGrid& grid) {
    std::string out;
    out.reserve(grid.sample_count() * dtype_size(grid.dtype()));
    std::visit(
        [&out](const auto& cells) {
            using T = typename std::decay_t<decltype(cells)>::value_type;
            for (const T v : cells) {
                if constexpr (std::is_same_v<T, std::uint8_t>) {
                    out.push_back(static_cast<char>(v));
                } else if constexpr (std::is_same_v<T, std::uint16_t>) {
                    append_le16(out, v);
                } else {
                    append_le32(out, std::bit_cast<std::uint32_t>(v));
                }
            }
        },
        grid.buffer());
    return out;
}

PixelBuffer decode_samples(DataType dtype, const std::string& bytes, std::size_t n) {
    switch (dtype) {
        case DataType::U8: {
            std::vector<std::uint8_t> v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<std::uint8_t>(bytes[i]);
            return v;
        }
        case DataType::U16: {
            std::vector<std::uint16_t> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto lo = static_cast<std::uint8_t>(bytes[2 * i]);
                const auto hi = static_cast<std::uint8_t>(bytes[2 * i + 1]);
                v[i] = static_cast<std::uint16_t>(lo | (hi << 8));
            }
            return v;
        }
        case DataType::F32: {
            std::vector<float> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto b0 = static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[4 * i]));
                const auto b1 =
                    static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[4 * i + 1]));
                const auto b2 =
                    static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[4 * i + 2]));
                const auto b3 =
                    static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[4 * i + 3]));
                v[i] = std::bit_cast<float>(b0 | (b1 << 8) | (b2 << 16) | (b3 << 24));
            }
            return v;
        }
    }
    throw ConfigError("unknown dtype enum value");
}

const json& require_key(const json& doc, const char* key, const std::filesystem::path& path) {
    const auto it = doc.find(key);
    if (it == doc.end())
        throw FormatError("raster header " + path.string() + " is missing key '" + key + "'");
    return *it;
}

}  // namespace

void write_raster(const RasterGrid& grid, const std::filesystem::path& path) {
    const auto stem = stem_of(path);

    json header;
    header["width"] = grid.width();
    header["height"] = grid.height();
    header["band_count"] = grid.band_count();
    header["dtype"] = std::string(dtype_name(grid.dtype()));
    if (grid.nodata())
        header["nodata"] = *grid.nodata();
    else
        header["nodata"] = nullptr;
    header["geotransform"] = {grid.geotransform().origin_x,  grid.geotransform().pixel_width,
                              grid.geotransform().row_rot,   grid.geotransform().origin_y,
                              grid.geotransform().col_rot,   grid.geotransform().pixel_height};
    header["crs_id"] = grid.crs_id();
    header["band_names"] = grid.band_names();

    auto header_path = stem;
    header_path += ".lrh";
    write_file(header_path, header.dump(2) + "\n");

    auto data_path = stem;
    data_path += ".lrd";
    write_file(data_path, encode_samples(grid));
}

RasterGrid read_raster(const std::filesystem::path& path) {
    const auto stem = stem_of(path);
    auto header_path = stem;
    header_path += ".lrh";
    auto data_path = stem;
    data_path += ".lrd";

    const std::string header_text = read_file(header_path);
    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::parse_error& e) {
        throw FormatError("raster header " + header_path.string() + " is not valid JSON: " +
                          e.what());
    }
    if (!header.is_object())
        throw FormatError("raster header " + header_path.string() + " must be a JSON object");

    static const std::set<std::string> known_keys = {"width",  "height", "band_count",
                                                     "dtype",  "nodata", "geotransform",
                                                     "crs_id", "band_names"};
    for (const auto& [key, _] : header.items()) {
        if (!known_keys.count(key))
            throw FormatError("raster header " + header_path.string() + " has unknown key '" +
                              key + "'");
    }

    const auto& jw = require_key(header, "width", header_path);
    const auto& jh = require_key(header, "height", header_path);
    const auto& jb = require_key(header, "band_count", header_path);
    const auto& jd = require_key(header, "dtype", header_path);
    const auto& jn = require_key(header, "nodata", header_path);
    const auto& jg = require_key(header, "geotransform", header_path);
    const auto& jc = require_key(header, "crs_id", header_path);
    const auto& jbn = require_key(header, "band_names", header_path);

    if (!jw.is_number_integer() || !jh.is_number_integer() || !jb.is_number_integer())
        throw FormatError("raster header dimensions must be integers");
    if (!jd.is_string()) throw FormatError("raster header dtype must be a string");
    const auto dtype = dtype_from_name(jd.get<std::string>());
    if (!dtype)
        throw FormatError("raster header has unknown dtype '" + jd.get<std::string>() + "'");
    if (!jn.is_null() && !jn.is_number()) throw FormatError("raster header nodata must be a number or null");
    if (!jg.is_array() || jg.size() != 6)
        throw FormatError("raster header geotransform must be an array of 6 numbers");
    for (const auto& c : jg) {
        if (!c.is_number()) throw FormatError("raster header geotransform must be an array of 6 numbers");
    }
    if (!jc.is_string()) throw FormatError("raster header crs_id must be a string");
    if (!jbn.is_array()) throw FormatError("raster header band_names must be an array of strings");

    const int width = jw.get<int>();
    const int height = jh.get<int>();
    const int band_count = jb.get<int>();

    std::vector<std::string> band_names;
    for (const auto& name : jbn) {
        if (!name.is_string()) throw FormatError("raster header band_names must be an array of strings");
        band_names.push_back(name.get<std::string>());
    }
    if (band_names.size() != static_cast<std::size_t>(band_count))
        throw FormatError("raster header band_names length must equal band_count");

    GeoTransform gt;
    gt.origin_x = jg[0].get<double>();
    gt.pixel_width = jg[1].get<double>();
    gt.row_rot = jg[2].get<double>();
    gt.origin_y = jg[3].get<double>();
    gt.col_rot = jg[4].get<double>();
    gt.pixel_height = jg[5].get<double>();

    std::optional<double> nodata;
    if (!jn.is_null()) nodata = jn.get<double>();

    if (width <= 0 || height <= 0 || band_count < 1)
        throw FormatError("raster header dimensions must be positive");

    const std::string bytes = read_file(data_path);
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                          static_cast<std::size_t>(band_count);
    const std::size_t expected = n * dtype_size(*dtype);
    if (bytes.size() != expected)
        throw CorruptionError("raster data " + data_path.string() + " has " +
                              std::to_string(bytes.size()) + " bytes, expected " +
                              std::to_string(expected));

    return RasterGrid(width, height, band_count, *dtype, gt, jc.get<std::string>(), nodata,
                      std::move(band_names), decode_samples(*dtype, bytes, n));
}

std::vector<LabeledSample> read_samples(const std::filesystem::path& path,
                                        const ClassLegend& legend) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("samples file " + path.string() + " is empty");
    {
        auto fields = split_csv_line(line);
        if (fields.size() != 3 || fields[0] != "x" || fields[1] != "y" ||
            fields[2] != "class_id")
            throw FormatError("samples file " + path.string() +
                              " must start with header line 'x,y,class_id'");
    }
    std::vector<LabeledSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw FormatError("samples file " + path.string() + " line " +
                              std::to_string(line_no) + ": expected 3 fields");
        const auto x = parse_double(fields[0]);
        const auto y = parse_double(fields[1]);
        const auto id = parse_int(fields[2]);
        if (!x || !y)
            throw FormatError("samples file " + path.string() + " line " +
                              std::to_string(line_no) + ": non-numeric coordinate");
        if (!id)
            throw FormatError("samples file " + path.string() + " line " +
                              std::to_string(line_no) + ": non-numeric class id");
        if (!legend.contains(static_cast<int>(*id)))
            throw ValidationError("samples file " + path.string() + " line " +
                                  std::to_string(line_no) + ": class id " + std::to_string(*id) +
                                  " not present in legend");
        samples.push_back({*x, *y, static_cast<int>(*id)});
    }
    return samples;
}

void write_samples(const std::vector<LabeledSample>& samples, std::ostream& out) {
    out << "x,y,class_id\n";
    for (const auto& s : samples)
        out << format_double(s.x) << ',' << format_double(s.y) << ',' << s.class_id << '\n';
}

void write_samples(const std::vector<LabeledSample>& samples,
                   const std::filesystem::path& path) {
    std::ostringstream out;
    write_samples(samples, out);
    write_file(path, std::move(out).str());
}

std::vector<RegionPolygon> read_regions(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError("regions file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) throw FormatError("regions file " + path.string() + " must be a JSON array");

    std::vector<RegionPolygon> regions;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("region_id") || !entry.contains("name") ||
            !entry.contains("rings"))
            throw FormatError("regions file " + path.string() +
                              ": each entry needs region_id, name and rings");
        RegionPolygon poly;
        poly.region_id = entry["region_id"].get<std::string>();
        poly.name = entry["name"].get<std::string>();
        const auto& rings = entry["rings"];
        if (!rings.is_array())
            throw FormatError("regions file " + path.string() + ": rings must be an array");
        for (const auto& ring : rings) {
            std::vector<MapPoint> pts;
            for (const auto& pt : ring) {
                if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                    throw FormatError("regions file " + path.string() +
                                      ": ring vertices must be [x, y] number pairs");
                pts.push_back({pt[0].get<double>(), pt[1].get<double>()});
            }
            poly.rings.push_back(std::move(pts));
        }
        validate_region(poly);
        regions.push_back(std::move(poly));
    }
    return regions;
}

void write_regions(const std::vector<RegionPolygon>& regions,
                   const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& poly : regions) {
        json rings = json::array();
        for (const auto& ring : poly.rings) {
            json pts = json::array();
            for (const auto& pt : ring) pts.push_back({pt.x, pt.y});
            rings.push_back(std::move(pts));
        }
        doc.push_back({{"region_id", poly.region_id}, {"name", poly.name}, {"rings", rings}});
    }
    write_file(path, doc.dump(2) + "\n");
}

ClassLegend read_legend(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError("legend file " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_array()) throw FormatError("legend file " + path.string() + " must be a JSON array");
    std::vector<std::pair<int, std::string>> entries;
    for (const auto& entry : doc) {
        if (!entry.is_object() || !entry.contains("id") || !entry.contains("name") ||
            !entry["id"].is_number_integer() || !entry["name"].is_string())
            throw FormatError("legend file " + path.string() +
                              ": each entry needs integer id and string name");
        entries.emplace_back(entry["id"].get<int>(), entry["name"].get<std::string>());
    }
    return ClassLegend(std::move(entries));
}

void write_legend(const ClassLegend& legend, const std::filesystem::path& path) {
    json doc = json::array();
    for (const auto& [id, name] : legend.entries()) doc.push_back({{"id", id}, {"name", name}});
    write_file(path, doc.dump(2) + "\n");
}

}  // namespace lulc::io
