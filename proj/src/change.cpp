#include "lulc/change.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "lulc/text.hpp"

namespace lulc {

std::int64_t TransitionMatrix::grand_total() const {
    std::int64_t s = 0;
    for (const auto& row : counts)
        for (const std::int64_t c : row) s += c;
    return s;
}

std::int64_t TransitionMatrix::row_sum(std::size_t i) const {
    std::int64_t s = 0;
    for (const std::int64_t c : counts[i]) s += c;
    return s;
}

std::int64_t TransitionMatrix::col_sum(std::size_t j) const {
    std::int64_t s = 0;
    for (const auto& row : counts) s += row[j];
    return s;
}

std::int64_t TransitionMatrix::diagonal_sum() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) s += counts[i][i];
    return s;
}

TransitionMatrix transition_matrix(const ClassMap& earlier, const ClassMap& later) {
    if (!earlier.grid().same_geometry(later.grid()))
        throw ValidationError("transition inputs must share geometry and CRS");
    if (!(earlier.legend() == later.legend()))
        throw ValidationError("transition inputs must share one legend");

    const auto& legend = earlier.legend();
    TransitionMatrix tm;
    tm.legend = legend;
    tm.counts.assign(legend.size(), std::vector<std::int64_t>(legend.size(), 0));
    tm.pixel_area_m2 = pixel_area_m2(earlier.grid());

    const auto& a = earlier.grid().cells<std::uint8_t>();
    const auto& b = later.grid().cells<std::uint8_t>();
    const auto& a_nodata = earlier.grid().nodata();
    const auto& b_nodata = later.grid().nodata();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool a_valid = !(a_nodata && static_cast<double>(a[i]) == *a_nodata);
        const bool b_valid = !(b_nodata && static_cast<double>(b[i]) == *b_nodata);
        if (!a_valid || !b_valid) {
            ++tm.excluded_pixels;
            continue;
        }
        tm.counts[legend.index_of(a[i])][legend.index_of(b[i])] += 1;
    }
    return tm;
}

double pixel_area_m2(const RasterGrid& grid) {
    // Area of the parallelogram spanned by the column and row step vectors;
    // equals |pixel_width * pixel_height| for unrotated grids.
    return std::abs(grid.geotransform().determinant());
}

double class_area_km2(const ClassMap& map, int class_id) {
    const auto counts = map.histogram();
    const std::size_t i = map.legend().index_of(class_id);
    return static_cast<double>(counts[i]) * pixel_area_m2(map.grid()) / 1e6;
}

ZonalAreaTable zonal_class_area(const ClassMap& map, const std::vector<RegionPolygon>& regions,
                                int year, int workers) {
    const double area_m2 = pixel_area_m2(map.grid());
    const auto& cells = map.grid().cells<std::uint8_t>();
    const auto& nodata = map.grid().nodata();
    const auto& legend = map.legend();

    struct RegionResult {
        std::vector<std::int64_t> counts;
        std::int64_t mask_pixels = 0;
    };
    std::vector<RegionResult> results(regions.size());

    const auto run_region = [&](std::size_t ri) {
        const auto mask = rasterize_polygon(regions[ri], map.grid());
        RegionResult res;
        res.counts.assign(legend.size(), 0);
        for (std::size_t i = 0; i < mask.size(); ++i) {
            if (!mask[i]) continue;
            ++res.mask_pixels;
            if (nodata && static_cast<double>(cells[i]) == *nodata) continue;
            res.counts[legend.index_of(cells[i])] += 1;
        }
        results[ri] = std::move(res);
    };

    const int n_workers =
        std::max(1, std::min(workers, static_cast<int>(regions.size())));
    if (n_workers <= 1) {
        for (std::size_t ri = 0; ri < regions.size(); ++ri) run_region(ri);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t ri = next.fetch_add(1); ri < regions.size();
                         ri = next.fetch_add(1))
                        run_region(ri);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    ZonalAreaTable table;
    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
        if (results[ri].mask_pixels == 0)
            table.warnings.push_back("region '" + regions[ri].region_id +
                                     "' covers no pixel centers; reporting zero areas");
        for (std::size_t ci = 0; ci < legend.size(); ++ci) {
            table.rows.push_back({regions[ri].region_id, regions[ri].name, year,
                                  legend.entries()[ci].first, results[ri].counts[ci],
                                  static_cast<double>(results[ri].counts[ci]) * area_m2 / 1e6});
        }
    }
    return table;
}

std::optional<double> percent_change(double start_km2, double end_km2) {
    if (start_km2 < 0.0 || end_km2 < 0.0) throw ValidationError("areas must be non-negative");
    if (start_km2 == 0.0) return std::nullopt;
    return 100.0 * (end_km2 - start_km2) / start_km2;
}

ChangeReport change_series(const std::vector<std::pair<int, ClassMap>>& maps,
                           const std::vector<RegionPolygon>& regions,
                           const std::vector<int>& focus_classes) {
    if (maps.size() < 2) throw ValidationError("change series needs at least two yearly maps");
    for (std::size_t i = 1; i < maps.size(); ++i) {
        if (maps[i].first <= maps[i - 1].first)
            throw ValidationError("years must be strictly increasing (got " +
                                  std::to_string(maps[i - 1].first) + " then " +
                                  std::to_string(maps[i].first) + ")");
        if (!maps[i].second.grid().same_geometry(maps[0].second.grid()))
            throw ValidationError("all yearly maps must share geometry and CRS");
        if (!(maps[i].second.legend() == maps[0].second.legend()))
            throw ValidationError("all yearly maps must share one legend");
    }
    if (regions.empty()) throw ValidationError("change series needs at least one region");
    if (focus_classes.empty()) throw ValidationError("change series needs at least one focus class");
    const auto& legend = maps[0].second.legend();
    for (const int c : focus_classes) legend.index_of(c);

    ChangeReport report;
    for (const auto& [year, map] : maps) report.years.push_back(year);

    const double area_m2 = pixel_area_m2(maps[0].second.grid());

    for (const auto& region : regions) {
        // One mask per region, shared across every year (same geometry).
        const auto mask = rasterize_polygon(region, maps[0].second.grid());
        std::int64_t mask_pixels = 0;
        for (const auto m : mask) mask_pixels += m;
        if (mask_pixels == 0)
            report.warnings.push_back("region '" + region.region_id +
                                      "' covers no pixel centers; reporting zero areas");

        for (const int class_id : focus_classes) {
            ChangeRow row;
            row.region_id = region.region_id;
            row.region_name = region.name;
            row.class_id = class_id;
            row.class_name = legend.name_of(class_id);
            for (const auto& [year, map] : maps) {
                const auto& cells = map.grid().cells<std::uint8_t>();
                const auto& nodata = map.grid().nodata();
                std::int64_t count = 0;
                for (std::size_t i = 0; i < mask.size(); ++i) {
                    if (!mask[i]) continue;
                    if (nodata && static_cast<double>(cells[i]) == *nodata) continue;
                    if (cells[i] == class_id) ++count;
                }
                row.area_by_year_km2.push_back(static_cast<double>(count) * area_m2 / 1e6);
            }
            row.baseline_km2 = row.area_by_year_km2.front();
            row.delta_km2 = row.area_by_year_km2.back() - row.area_by_year_km2.front();
            row.pct_change = percent_change(row.area_by_year_km2.front(),
                                            row.area_by_year_km2.back());
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

void write_change_report_csv(const ChangeReport& report, std::ostream& out) {
    out << "region,class";
    for (const int year : report.years) out << ",area_" << year << "_km2";
    out << ",delta_km2,pct_change,baseline_km2\n";
    for (const auto& row : report.rows) {
        out << row.region_name << ',' << row.class_name;
        for (const double a : row.area_by_year_km2) out << ',' << format_double(a);
        out << ',' << format_double(row.delta_km2) << ',';
        if (row.pct_change)
            out << format_double(*row.pct_change);
        else
            out << "n/a";
        out << ',' << format_double(row.baseline_km2) << '\n';
    }
}

void write_change_report_csv(const ChangeReport& report, const std::filesystem::path& path) {
    std::ostringstream buf;
    write_change_report_csv(report, buf);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const std::string s = std::move(buf).str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

ChangeReport read_change_report_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::string line;
    if (!std::getline(in, line))
        throw FormatError("change report " + path.string() + " is empty");

    const auto header = split_csv_line(line);
    if (header.size() < 5 || header[0] != "region" || header[1] != "class")
        throw FormatError("change report " + path.string() + " has an unexpected header");

    ChangeReport report;
    std::size_t n_years = 0;
    for (std::size_t i = 2; i + 3 < header.size(); ++i) {
        const auto field = header[i];
        if (field.size() < 10 || field.substr(0, 5) != "area_" ||
            field.substr(field.size() - 4) != "_km2")
            throw FormatError("change report " + path.string() +
                              " has an unexpected area column '" + std::string(field) + "'");
        const auto year = parse_int(field.substr(5, field.size() - 9));
        if (!year)
            throw FormatError("change report " + path.string() +
                              " has a non-numeric year in column '" + std::string(field) + "'");
        report.years.push_back(static_cast<int>(*year));
        ++n_years;
    }
    if (n_years < 2 || header[2 + n_years] != "delta_km2" ||
        header[3 + n_years] != "pct_change" || header[4 + n_years] != "baseline_km2")
        throw FormatError("change report " + path.string() + " has an unexpected header");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw FormatError("change report " + path.string() + " line " +
                              std::to_string(line_no) + ": wrong field count");
        ChangeRow row;
        row.region_id = std::string(fields[0]);
        row.region_name = std::string(fields[0]);
        row.class_name = std::string(fields[1]);
        for (std::size_t i = 0; i < n_years; ++i) {
            const auto v = parse_double(fields[2 + i]);
            if (!v)
                throw FormatError("change report " + path.string() + " line " +
                                  std::to_string(line_no) + ": non-numeric area");
            row.area_by_year_km2.push_back(*v);
        }
        const auto delta = parse_double(fields[2 + n_years]);
        const auto baseline = parse_double(fields[4 + n_years]);
        if (!delta || !baseline)
            throw FormatError("change report " + path.string() + " line " +
                              std::to_string(line_no) + ": non-numeric delta or baseline");
        row.delta_km2 = *delta;
        row.baseline_km2 = *baseline;
        if (fields[3 + n_years] != "n/a") {
            const auto pct = parse_double(fields[3 + n_years]);
            if (!pct)
                throw FormatError("change report " + path.string() + " line " +
                                  std::to_string(line_no) + ": non-numeric pct_change");
            row.pct_change = *pct;
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

void write_zonal_table_csv(const ZonalAreaTable& table, std::ostream& out) {
    out << "region,year,class,pixel_count,area_km2\n";
    for (const auto& row : table.rows)
        out << row.region_name << ',' << row.year << ',' << row.class_id << ','
            << row.pixel_count << ',' << format_double(row.area_km2) << '\n';
}

void write_zonal_table_csv(const ZonalAreaTable& table, const std::filesystem::path& path) {
    std::ostringstream buf;
    write_zonal_table_csv(table, buf);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const std::string s = std::move(buf).str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace lulc
