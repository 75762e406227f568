#pragma once

#include "lulc/raster.hpp"

namespace lulc {

// Nodata sentinel for index rasters; well outside the [-1, 1] index range.
inline constexpr float kIndexNodata = -9999.0f;

// Per-pixel (a - b) / (a + b) over one band of each input raster, computed in
// f64 and stored as a single-band f32 grid. Pixels where a + b == 0 or where
// either input sample is nodata become kIndexNodata. Results are clamped to
// [-1, 1] so the index invariant also holds for negative input samples.
// NDVI is normalized_difference(raster, nir_band, raster, red_band).
// Band indices are zero-based. Throws ValidationError on geometry mismatch
// and IndexError on a bad band index.
RasterGrid normalized_difference(const RasterGrid& a, int a_band, const RasterGrid& b,
                                 int b_band);

}  // namespace lulc
