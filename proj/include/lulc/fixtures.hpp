#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lulc/raster.hpp"

namespace lulc {

// Per-class spectral signature: a mean reflectance per band plus a diagonal
// noise sigma per band (scalars broadcast on JSON input).
struct ClassSignature {
    int class_id = 0;
    std::vector<double> mean;
    std::vector<double> sigma;
};

// Half-open pixel rectangle [x0, x1) x [y0, y1) painted with class_id.
struct LabeledRect {
    int class_id = 0;
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
};

// Deterministic synthetic multispectral scene: rectangles painted in order
// (later rectangles win overlaps) on an optional background class; pixels
// covered by neither become nodata in both the scene and the ground truth.
struct SceneSpec {
    int width = 0;
    int height = 0;
    int bands = 0;
    std::uint64_t seed = 0;
    std::vector<ClassSignature> classes;
    std::vector<LabeledRect> layout;
    std::optional<int> background_class_id;
    ClassLegend legend = ClassLegend::canonical();
};

SceneSpec scene_spec_from_json(const std::string& text);
std::string scene_spec_to_json(const SceneSpec& spec);

struct GeneratedScene {
    RasterGrid raster;  // f32, nodata -9999
    ClassMap truth;     // u8, nodata 0
};

// Band vectors drawn per pixel from the class signature via a splitmix64
// stream seeded by spec.seed; identical specs generate identical scenes.
GeneratedScene generate_scene(const SceneSpec& spec);

// Expands every layout rectangle of one class by an integer pixel margin per
// year, clipping at the raster boundary (clips are reported as warnings).
struct GrowthRule {
    int class_id = 0;
    int margin_px_per_year = 1;
};

struct GrowthSeries {
    std::vector<std::pair<int, ClassMap>> maps;  // (year, ground truth)
    std::vector<std::string> warnings;
};

GrowthSeries generate_growth_series(const SceneSpec& base, int start_year, int years,
                                    const GrowthRule& rule);

}  // namespace lulc
