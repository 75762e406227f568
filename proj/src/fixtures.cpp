#include "lulc/fixtures.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "lulc/rng.hpp"

namespace lulc {

namespace {

using nlohmann::json;

constexpr double kSceneNodata = -9999.0;

void validate_spec(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) throw ValidationError("scene width and height must be positive");
    if (spec.bands < 1) throw ValidationError("scene needs at least one band");
    if (spec.classes.empty()) throw ValidationError("scene needs at least one class signature");
    std::map<int, const ClassSignature*> by_id;
    for (const auto& sig : spec.classes) {
        if (!spec.legend.contains(sig.class_id))
            throw ValidationError("signature class id " + std::to_string(sig.class_id) +
                                  " not present in legend");
        if (sig.mean.size() != static_cast<std::size_t>(spec.bands) ||
            sig.sigma.size() != static_cast<std::size_t>(spec.bands))
            throw ValidationError("signature for class " + std::to_string(sig.class_id) +
                                  " must have one mean and one sigma per band");
        for (const double s : sig.sigma)
            if (s < 0.0) throw ValidationError("signature sigmas must be non-negative");
        if (!by_id.emplace(sig.class_id, &sig).second)
            throw ValidationError("duplicate signature for class " + std::to_string(sig.class_id));
    }
    for (const auto& rect : spec.layout) {
        if (!by_id.count(rect.class_id))
            throw ValidationError("layout rectangle references class " +
                                  std::to_string(rect.class_id) + " with no signature");
        if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > spec.width || rect.y1 > spec.height ||
            rect.x0 >= rect.x1 || rect.y0 >= rect.y1)
            throw ValidationError("layout rectangle outside the scene extent or empty");
    }
    if (spec.background_class_id && !by_id.count(*spec.background_class_id))
        throw ValidationError("background class has no signature");
}

// Ground-truth paint: background (or 0 = nodata), then rectangles in order.
std::vector<std::uint8_t> paint_truth(int width, int height,
                                      const std::optional<int>& background,
                                      const std::vector<LabeledRect>& layout) {
    std::vector<std::uint8_t> truth(
        static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
        background ? static_cast<std::uint8_t>(*background) : 0);
    for (const auto& rect : layout) {
        for (int y = rect.y0; y < rect.y1; ++y) {
            const std::size_t row_off = static_cast<std::size_t>(y) * static_cast<std::size_t>(width);
            for (int x = rect.x0; x < rect.x1; ++x)
                truth[row_off + static_cast<std::size_t>(x)] =
                    static_cast<std::uint8_t>(rect.class_id);
        }
    }
    return truth;
}

GeoTransform scene_geotransform() {
    GeoTransform gt;
    gt.origin_x = 0.0;
    gt.pixel_width = 10.0;
    gt.row_rot = 0.0;
    gt.origin_y = 0.0;
    gt.col_rot = 0.0;
    gt.pixel_height = -10.0;
    return gt;
}

}  // namespace

SceneSpec scene_spec_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("scene spec is not valid JSON: ") + e.what());
    }
    SceneSpec spec;
    try {
        spec.width = doc.at("width").get<int>();
        spec.height = doc.at("height").get<int>();
        spec.bands = doc.at("bands").get<int>();
        spec.seed = doc.at("seed").get<std::uint64_t>();
        for (const auto& jc : doc.at("classes")) {
            ClassSignature sig;
            sig.class_id = jc.at("class_id").get<int>();
            sig.mean = jc.at("mean").get<std::vector<double>>();
            const auto& js = jc.at("sigma");
            if (js.is_number())
                sig.sigma.assign(static_cast<std::size_t>(spec.bands), js.get<double>());
            else
                sig.sigma = js.get<std::vector<double>>();
            spec.classes.push_back(std::move(sig));
        }
        for (const auto& jr : doc.at("layout")) {
            spec.layout.push_back({jr.at("class_id").get<int>(), jr.at("x0").get<int>(),
                                   jr.at("y0").get<int>(), jr.at("x1").get<int>(),
                                   jr.at("y1").get<int>()});
        }
        if (doc.contains("background_class_id") && !doc["background_class_id"].is_null())
            spec.background_class_id = doc["background_class_id"].get<int>();
        if (doc.contains("legend")) {
            std::vector<std::pair<int, std::string>> entries;
            for (const auto& e : doc["legend"])
                entries.emplace_back(e.at("id").get<int>(), e.at("name").get<std::string>());
            spec.legend = ClassLegend(std::move(entries));
        }
    } catch (const json::exception& e) {
        throw FormatError(std::string("scene spec has a malformed field: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

std::string scene_spec_to_json(const SceneSpec& spec) {
    json doc;
    doc["width"] = spec.width;
    doc["height"] = spec.height;
    doc["bands"] = spec.bands;
    doc["seed"] = spec.seed;
    json classes = json::array();
    for (const auto& sig : spec.classes)
        classes.push_back({{"class_id", sig.class_id}, {"mean", sig.mean}, {"sigma", sig.sigma}});
    doc["classes"] = std::move(classes);
    json layout = json::array();
    for (const auto& r : spec.layout)
        layout.push_back({{"class_id", r.class_id},
                          {"x0", r.x0},
                          {"y0", r.y0},
                          {"x1", r.x1},
                          {"y1", r.y1}});
    doc["layout"] = std::move(layout);
    if (spec.background_class_id)
        doc["background_class_id"] = *spec.background_class_id;
    else
        doc["background_class_id"] = nullptr;
    json legend = json::array();
    for (const auto& [id, name] : spec.legend.entries())
        legend.push_back({{"id", id}, {"name", name}});
    doc["legend"] = std::move(legend);
    return doc.dump(2) + "\n";
}

GeneratedScene generate_scene(const SceneSpec& spec) {
    validate_spec(spec);

    const auto truth_cells = paint_truth(spec.width, spec.height, spec.background_class_id,
                                         spec.layout);

    std::map<int, const ClassSignature*> by_id;
    for (const auto& sig : spec.classes) by_id[sig.class_id] = &sig;

    const std::size_t n_pixels = truth_cells.size();
    const std::size_t plane = n_pixels;
    std::vector<float> scene(n_pixels * static_cast<std::size_t>(spec.bands),
                             static_cast<float>(kSceneNodata));

    SplitMix64 rng(spec.seed);
    for (std::size_t i = 0; i < n_pixels; ++i) {
        const std::uint8_t cls = truth_cells[i];
        if (cls == 0) continue;  // uncovered: stays nodata in every band
        const ClassSignature& sig = *by_id.at(cls);
        for (int b = 0; b < spec.bands; ++b) {
            const auto bi = static_cast<std::size_t>(b);
            scene[bi * plane + i] =
                static_cast<float>(sig.mean[bi] + sig.sigma[bi] * rng.next_gaussian());
        }
    }

    RasterGrid raster(spec.width, spec.height, spec.bands, DataType::F32, scene_geotransform(),
                      "EPSG:32640", kSceneNodata, {}, std::move(scene));
    RasterGrid truth(spec.width, spec.height, 1, DataType::U8, scene_geotransform(),
                     "EPSG:32640", 0.0, {"class"}, truth_cells);
    return {std::move(raster), ClassMap(std::move(truth), spec.legend)};
}

GrowthSeries generate_growth_series(const SceneSpec& base, int start_year, int years,
                                    const GrowthRule& rule) {
    validate_spec(base);
    if (years < 1) throw ValidationError("growth series needs at least one year");
    if (rule.margin_px_per_year < 0) throw ValidationError("growth margin must be non-negative");
    if (!base.legend.contains(rule.class_id))
        throw ValidationError("growth class id " + std::to_string(rule.class_id) +
                              " not present in legend");

    GrowthSeries series;
    for (int k = 0; k < years; ++k) {
        const int margin = k * rule.margin_px_per_year;
        std::vector<LabeledRect> layout = base.layout;
        bool clipped = false;
        for (auto& rect : layout) {
            if (rect.class_id != rule.class_id) continue;
            const int gx0 = rect.x0 - margin;
            const int gy0 = rect.y0 - margin;
            const int gx1 = rect.x1 + margin;
            const int gy1 = rect.y1 + margin;
            rect.x0 = std::max(0, gx0);
            rect.y0 = std::max(0, gy0);
            rect.x1 = std::min(base.width, gx1);
            rect.y1 = std::min(base.height, gy1);
            if (rect.x0 != gx0 || rect.y0 != gy0 || rect.x1 != gx1 || rect.y1 != gy1)
                clipped = true;
        }
        if (clipped)
            series.warnings.push_back("year " + std::to_string(start_year + k) +
                                      ": growth clipped at the raster boundary");

        const auto truth_cells =
            paint_truth(base.width, base.height, base.background_class_id, layout);
        RasterGrid truth(base.width, base.height, 1, DataType::U8, scene_geotransform(),
                         "EPSG:32640", 0.0, {"class"}, truth_cells);
        series.maps.emplace_back(start_year + k, ClassMap(std::move(truth), base.legend));
    }
    return series;
}

}  // namespace lulc
