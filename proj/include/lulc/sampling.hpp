#pragma once

#include <cstdint>
#include <vector>

#include "lulc/raster.hpp"

namespace lulc {

struct SamplePlan {
    int n_per_class = 1;
    std::uint64_t seed = 0;
    ClassLegend legend;
};

// Exactly n_per_class pixel-center points per legend class, drawn without
// replacement by a splitmix64-seeded partial shuffle over each class's
// row-major pixel index list. Identical (map, plan) inputs give identical
// output on every platform. Pixels whose index appears in exclude (mapped
// through map_to_pixel) are removed from the candidate pool first.
// Throws SamplingError naming the first class with too few pixels.
std::vector<LabeledSample> stratified_random_points(
    const ClassMap& map, const SamplePlan& plan,
    const std::vector<LabeledSample>* exclude = nullptr);

}  // namespace lulc
