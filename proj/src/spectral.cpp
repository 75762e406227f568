#include "lulc/spectral.hpp"

#include <algorithm>
#include <string>

namespace lulc {

RasterGrid normalized_difference(const RasterGrid& a, int a_band, const RasterGrid& b,
                                 int b_band) {
    if (!a.same_geometry(b))
        throw ValidationError("normalized_difference inputs must share geometry and CRS");
    if (a_band < 0 || a_band >= a.band_count())
        throw IndexError("band index " + std::to_string(a_band) + " out of range");
    if (b_band < 0 || b_band >= b.band_count())
        throw IndexError("band index " + std::to_string(b_band) + " out of range");

    const int w = a.width();
    const int h = a.height();
    std::vector<float> out(static_cast<std::size_t>(w) * static_cast<std::size_t>(h));

    const auto read_band = [](const RasterGrid& g, int band, std::size_t i) {
        return std::visit(
            [&](const auto& cells) {
                return static_cast<double>(cells[static_cast<std::size_t>(band) * g.pixel_count() + i]);
            },
            g.buffer());
    };

    const auto& a_nodata = a.nodata();
    const auto& b_nodata = b.nodata();
    const std::size_t n = a.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double av = read_band(a, a_band, i);
        const double bv = read_band(b, b_band, i);
        if ((a_nodata && av == *a_nodata) || (b_nodata && bv == *b_nodata)) {
            out[i] = kIndexNodata;
            continue;
        }
        const double denom = av + bv;
        if (denom == 0.0) {
            out[i] = kIndexNodata;
            continue;
        }
        out[i] = static_cast<float>(std::clamp((av - bv) / denom, -1.0, 1.0));
    }

    return RasterGrid(w, h, 1, DataType::F32, a.geotransform(), a.crs_id(),
                      static_cast<double>(kIndexNodata), {"nd"}, std::move(out));
}

}  // namespace lulc
