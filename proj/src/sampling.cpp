#include "lulc/sampling.hpp"

#include <algorithm>
#include <set>

#include "lulc/rng.hpp"

namespace lulc {

std::vector<LabeledSample> stratified_random_points(const ClassMap& map, const SamplePlan& plan,
                                                    const std::vector<LabeledSample>* exclude) {
    if (plan.n_per_class < 1) throw ValidationError("n_per_class must be >= 1");
    if (plan.legend.size() == 0) throw ValidationError("sample plan needs a nonempty legend");

    const auto& grid = map.grid();
    const int w = grid.width();

    std::set<std::size_t> excluded_pixels;
    if (exclude) {
        for (const auto& s : *exclude) {
            if (const auto px = grid.map_to_pixel(s.x, s.y))
                excluded_pixels.insert(static_cast<std::size_t>(px->row) *
                                           static_cast<std::size_t>(w) +
                                       static_cast<std::size_t>(px->col));
        }
    }

    // Per-class candidate pixel indices, enumerated in row-major order.
    std::vector<std::vector<std::size_t>> candidates(plan.legend.size());
    const auto& cells = grid.cells<std::uint8_t>();
    const auto& nodata = grid.nodata();
    std::size_t valid_pixels = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (nodata && static_cast<double>(cells[i]) == *nodata) continue;
        ++valid_pixels;
        if (excluded_pixels.count(i)) continue;
        candidates[plan.legend.index_of(cells[i])].push_back(i);
    }
    if (valid_pixels == 0) throw ValidationError("class map has no valid pixels to sample");

    SplitMix64 rng(plan.seed);
    std::vector<LabeledSample> points;
    points.reserve(plan.legend.size() * static_cast<std::size_t>(plan.n_per_class));

    for (std::size_t ci = 0; ci < plan.legend.size(); ++ci) {
        const auto& [class_id, class_name] = plan.legend.entries()[ci];
        auto& pool = candidates[ci];
        const auto n_take = static_cast<std::size_t>(plan.n_per_class);
        if (pool.size() < n_take)
            throw SamplingError("class '" + class_name + "' has only " +
                                std::to_string(pool.size()) + " selectable pixels, need " +
                                std::to_string(n_take));
        // Partial Fisher-Yates: the first n_take slots become the sample.
        for (std::size_t i = 0; i < n_take; ++i) {
            const std::size_t j = i + rng.next_below(pool.size() - i);
            std::swap(pool[i], pool[j]);
            const std::size_t pixel = pool[i];
            const int col = static_cast<int>(pixel % static_cast<std::size_t>(w));
            const int row = static_cast<int>(pixel / static_cast<std::size_t>(w));
            const MapPoint p = grid.pixel_to_map(col, row);
            points.push_back({p.x, p.y, class_id});
        }
    }
    return points;
}

}  // namespace lulc
