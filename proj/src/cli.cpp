#include "lulc/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "lulc/accuracy.hpp"
#include "lulc/change.hpp"
#include "lulc/chart.hpp"
#include "lulc/classify.hpp"
#include "lulc/fixtures.hpp"
#include "lulc/io.hpp"
#include "lulc/sampling.hpp"
#include "lulc/spectral.hpp"
#include "lulc/text.hpp"

namespace lulc::cli {

namespace {

ClassLegend load_legend(const std::string& path) {
    if (path.empty()) return ClassLegend::canonical();
    return io::read_legend(path);
}

ClassMap load_class_map(const std::string& stem, const ClassLegend& legend) {
    return ClassMap(io::read_raster(stem), legend);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for " + path);
    return std::move(buf).str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for " + path);
}

// Writes to the path, or to stdout when the path is empty or "-".
template <typename WriteFn>
void emit_csv(const std::string& out_path, WriteFn&& write_fn) {
    if (out_path.empty() || out_path == "-") {
        write_fn(std::cout);
    } else {
        std::ostringstream buf;
        write_fn(buf);
        write_text_file(out_path, std::move(buf).str());
    }
}

int parse_year_map_arg(const std::string& arg, std::string& stem) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos)
        throw ValidationError("--map expects <year>=<raster-stem>, got '" + arg + "'");
    const auto year = parse_int(std::string_view(arg).substr(0, eq));
    if (!year) throw ValidationError("--map has a non-numeric year in '" + arg + "'");
    stem = arg.substr(eq + 1);
    if (stem.empty()) throw ValidationError("--map has an empty raster path in '" + arg + "'");
    return static_cast<int>(*year);
}

std::vector<int> parse_class_tokens(const std::string& csv, const ClassLegend& legend) {
    std::vector<int> ids;
    std::size_t start = 0;
    while (start <= csv.size()) {
        const auto end = csv.find(',', start);
        const std::string token =
            csv.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!token.empty()) {
            if (const auto id = parse_int(token)) {
                legend.index_of(static_cast<int>(*id));  // validates
                ids.push_back(static_cast<int>(*id));
            } else if (const auto id_by_name = legend.id_of(token)) {
                ids.push_back(*id_by_name);
            } else {
                throw ValidationError("class '" + token + "' not present in legend");
            }
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (ids.empty()) throw ValidationError("no classes given");
    return ids;
}

// A rectangle region spanning the full raster extent, used when no regions
// file is supplied to change/zonal.
RegionPolygon whole_extent_region(const RasterGrid& grid) {
    const auto& gt = grid.geotransform();
    const double w = static_cast<double>(grid.width());
    const double h = static_cast<double>(grid.height());
    const auto corner = [&](double c, double r) -> MapPoint {
        return {gt.origin_x + c * gt.pixel_width + r * gt.row_rot,
                gt.origin_y + c * gt.col_rot + r * gt.pixel_height};
    };
    RegionPolygon poly;
    poly.region_id = "all";
    poly.name = "all";
    poly.rings = {{corner(0, 0), corner(w, 0), corner(w, h), corner(0, h), corner(0, 0)}};
    return poly;
}

struct SampleArgs {
    std::string map_stem;
    std::string legend_path;
    std::string exclude_path;
    std::string out_path;
    int n_per_class = 100;
    std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
    const auto legend = load_legend(a.legend_path);
    const auto map = load_class_map(a.map_stem, legend);
    std::vector<LabeledSample> exclude;
    if (!a.exclude_path.empty()) exclude = io::read_samples(a.exclude_path, legend);
    const SamplePlan plan{a.n_per_class, a.seed, legend};
    const auto points =
        stratified_random_points(map, plan, a.exclude_path.empty() ? nullptr : &exclude);
    emit_csv(a.out_path, [&](std::ostream& out) { io::write_samples(points, out); });
    return 0;
}

struct TrainArgs {
    std::string raster_stem;
    std::string samples_path;
    std::string legend_path;
    std::string out_path;
    std::string ndvi_bands;  // "<nir>,<red>", 1-based
    double ridge = -1.0;     // < 0: data-driven default
    bool strict_samples = false;
};

int cmd_train(const TrainArgs& a) {
    const auto legend = load_legend(a.legend_path);
    const auto raster = io::read_raster(a.raster_stem);
    const auto samples = io::read_samples(a.samples_path, legend);

    std::optional<NdviFeature> ndvi;
    if (!a.ndvi_bands.empty()) {
        const auto comma = a.ndvi_bands.find(',');
        const auto nir = parse_int(std::string_view(a.ndvi_bands).substr(0, comma));
        const auto red = comma == std::string::npos
                             ? std::nullopt
                             : parse_int(std::string_view(a.ndvi_bands).substr(comma + 1));
        if (!nir || !red)
            throw ValidationError("--ndvi-feature expects <nir_band>,<red_band> (1-based)");
        ndvi = NdviFeature{static_cast<int>(*nir) - 1, static_cast<int>(*red) - 1};
    }

    ExtractReport report;
    const auto features = extract_training(raster, samples, &report, a.strict_samples, ndvi);
    if (!report.out_of_extent.empty())
        std::cerr << "warning: " << report.out_of_extent.size()
                  << " sample(s) outside the raster extent were skipped\n";
    if (report.nodata_skipped > 0)
        std::cerr << "warning: " << report.nodata_skipped
                  << " sample(s) on nodata pixels were skipped\n";

    const double ridge = a.ridge < 0.0 ? default_ridge(features) : a.ridge;
    std::vector<std::string> warnings;
    const auto model = train_max_likelihood(features, ridge, legend, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    write_text_file(a.out_path, model.to_json());
    return 0;
}

struct ClassifyArgs {
    std::string model_path;
    std::string raster_stem;
    std::string out_stem;
    int workers = 0;  // 0: all cores
};

int cmd_classify(const ClassifyArgs& a) {
    const auto model = GaussianClassModel::from_json(read_text_file(a.model_path));
    const auto raster = io::read_raster(a.raster_stem);
    const int workers =
        a.workers > 0 ? a.workers : static_cast<int>(std::thread::hardware_concurrency());
    const auto map = predict(model, raster, std::max(1, workers));
    io::write_raster(map.grid(), a.out_stem);
    return 0;
}

struct IndexArgs {
    std::string raster_stem;
    std::string formula = "ndvi";
    std::string out_stem;
    int nir_band = 0;  // 1-based
    int red_band = 0;
};

int cmd_index(const IndexArgs& a) {
    if (a.formula != "ndvi")
        throw ValidationError("unknown index formula '" + a.formula + "' (supported: ndvi)");
    const auto raster = io::read_raster(a.raster_stem);
    const auto index = normalized_difference(raster, a.nir_band - 1, raster, a.red_band - 1);
    io::write_raster(index, a.out_stem);
    return 0;
}

struct AssessArgs {
    std::string ref_path;
    std::string pred_path;
    std::string legend_path;
    std::string out_path;
};

int cmd_assess(const AssessArgs& a) {
    const auto legend = load_legend(a.legend_path);
    const auto ref = io::read_samples(a.ref_path, legend);
    const auto pred = io::read_samples(a.pred_path, legend);
    std::vector<int> ref_ids;
    std::vector<int> pred_ids;
    ref_ids.reserve(ref.size());
    pred_ids.reserve(pred.size());
    for (const auto& s : ref) ref_ids.push_back(s.class_id);
    for (const auto& s : pred) pred_ids.push_back(s.class_id);
    const auto cm = ConfusionMatrix::from_labels(ref_ids, pred_ids, legend);
    emit_csv(a.out_path, [&](std::ostream& out) { write_accuracy_report_csv(cm, out); });
    return 0;
}

struct ChangeArgs {
    std::vector<std::string> map_args;  // <year>=<stem>
    std::string regions_path;
    std::string legend_path;
    std::string classes_csv = "Built Area,Crops";
    std::string out_path;
};

int cmd_change(const ChangeArgs& a) {
    const auto legend = load_legend(a.legend_path);
    std::vector<std::pair<int, ClassMap>> maps;
    for (const auto& arg : a.map_args) {
        std::string stem;
        const int year = parse_year_map_arg(arg, stem);
        maps.emplace_back(year, load_class_map(stem, legend));
    }
    std::vector<RegionPolygon> regions;
    if (!a.regions_path.empty())
        regions = io::read_regions(a.regions_path);
    else if (!maps.empty())
        regions.push_back(whole_extent_region(maps[0].second.grid()));
    const auto focus = parse_class_tokens(a.classes_csv, legend);
    const auto report = change_series(maps, regions, focus);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    emit_csv(a.out_path, [&](std::ostream& out) { write_change_report_csv(report, out); });
    return 0;
}

struct ZonalArgs {
    std::string map_stem;
    std::string regions_path;
    std::string legend_path;
    std::string out_path;
    int year = 0;
    int workers = 0;  // 0: all cores
};

int cmd_zonal(const ZonalArgs& a) {
    const auto legend = load_legend(a.legend_path);
    const auto map = load_class_map(a.map_stem, legend);
    std::vector<RegionPolygon> regions;
    if (!a.regions_path.empty())
        regions = io::read_regions(a.regions_path);
    else
        regions.push_back(whole_extent_region(map.grid()));
    const int workers =
        a.workers > 0 ? a.workers : static_cast<int>(std::thread::hardware_concurrency());
    const auto table = zonal_class_area(map, regions, a.year, std::max(1, workers));
    for (const auto& w : table.warnings) std::cerr << "warning: " << w << '\n';
    emit_csv(a.out_path, [&](std::ostream& out) { write_zonal_table_csv(table, out); });
    return 0;
}

struct ReportArgs {
    std::string change_path;
    std::string class_token;
    std::string legend_path;
    std::string area_out;
    std::string pct_out;
    bool sort_descending = false;
};

int cmd_report(const ReportArgs& a) {
    const auto legend = load_legend(a.legend_path);
    const auto report = read_change_report_csv(a.change_path);
    if (report.years.size() < 2)
        throw ValidationError("change report has fewer than two year columns");

    std::string class_name = a.class_token;
    if (const auto id = parse_int(a.class_token)) class_name = legend.name_of(static_cast<int>(*id));

    std::vector<const ChangeRow*> rows;
    for (const auto& row : report.rows)
        if (row.class_name == class_name) rows.push_back(&row);
    if (rows.empty())
        throw ValidationError("change report has no rows for class '" + class_name + "'");

    const int first_year = report.years.front();
    const int last_year = report.years.back();

    ChartSpec area;
    area.title = class_name + " by region";
    area.unit = "km²";
    area.sort_descending = a.sort_descending;
    area.series.resize(2);
    area.series[0].label = std::to_string(first_year);
    area.series[1].label = std::to_string(last_year);
    for (const auto* row : rows) {
        area.categories.push_back(row->region_name);
        area.series[0].values.push_back(row->area_by_year_km2.front());
        area.series[1].values.push_back(row->area_by_year_km2.back());
    }
    emit_bar_chart(area, a.area_out);

    ChartSpec pct;
    pct.title = class_name + " percent change by region, " + std::to_string(first_year) + " to " +
                std::to_string(last_year);
    pct.unit = "%";
    pct.sort_descending = a.sort_descending;
    pct.series.resize(1);
    pct.series[0].label = "% change";
    for (const auto* row : rows) {
        pct.categories.push_back(row->region_name);
        pct.series[0].values.push_back(row->pct_change);
    }
    emit_bar_chart(pct, a.pct_out);
    return 0;
}

struct FixtureArgs {
    std::string spec_path;
    std::string out_raster;
    std::string out_truth;
    std::string out_dir;
    int series_years = 0;
    int growth_class = 4;
    int growth_px = 1;
    int start_year = 2017;
};

int cmd_fixture(const FixtureArgs& a) {
    const auto spec = scene_spec_from_json(read_text_file(a.spec_path));
    if (a.series_years > 0) {
        if (a.out_dir.empty())
            throw ValidationError("--series-years needs --out-dir for the yearly maps");
        const auto series = generate_growth_series(spec, a.start_year, a.series_years,
                                                   {a.growth_class, a.growth_px});
        for (const auto& w : series.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& [year, map] : series.maps)
            io::write_raster(map.grid(),
                             std::filesystem::path(a.out_dir) / ("truth_" + std::to_string(year)));
        return 0;
    }
    if (a.out_raster.empty() || a.out_truth.empty())
        throw ValidationError("fixture needs --out-raster and --out-truth (or --series-years)");
    const auto scene = generate_scene(spec);
    io::write_raster(scene.raster, a.out_raster);
    io::write_raster(scene.truth.grid(), a.out_truth);
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"lulc: land-use/land-cover raster classification, accuracy and change toolkit"};
    app.require_subcommand(1);

    SampleArgs sample_args;
    auto* sample = app.add_subcommand(
        "sample", "Draw stratified random validation points from a class map");
    sample->add_option("--map", sample_args.map_stem, "Class-map raster stem")->required();
    sample->add_option("--n", sample_args.n_per_class, "Points per class")->capture_default_str();
    sample->add_option("--seed", sample_args.seed, "RNG seed")->capture_default_str();
    sample->add_option("--legend", sample_args.legend_path, "Legend JSON (default: canonical six classes)");
    sample->add_option("--exclude", sample_args.exclude_path, "Samples CSV whose pixels are excluded");
    sample->add_option("--out", sample_args.out_path, "Output CSV (default stdout)");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Fit the Gaussian maximum-likelihood classifier");
    train->add_option("--raster", train_args.raster_stem, "Multiband raster stem")->required();
    train->add_option("--samples", train_args.samples_path, "Labeled samples CSV")->required();
    train->add_option("--out", train_args.out_path, "Output model JSON")->required();
    train->add_option("--ridge", train_args.ridge,
                      "Covariance ridge (default: 1e-6 x mean class variance)");
    train->add_option("--legend", train_args.legend_path, "Legend JSON");
    train->add_option("--ndvi-feature", train_args.ndvi_bands,
                      "Append an NDVI feature: <nir_band>,<red_band> (1-based)");
    train->add_flag("--strict-samples", train_args.strict_samples,
                    "Fail on out-of-extent samples instead of skipping them");

    ClassifyArgs classify_args;
    auto* classify = app.add_subcommand("classify", "Predict a class map for a raster");
    classify->add_option("--model", classify_args.model_path, "Model JSON")->required();
    classify->add_option("--raster", classify_args.raster_stem, "Multiband raster stem")->required();
    classify->add_option("--out", classify_args.out_stem, "Output class-map stem")->required();
    classify->add_option("--workers", classify_args.workers,
                         "Prediction worker threads (default: all cores)");

    IndexArgs index_args;
    auto* index = app.add_subcommand("index", "Compute a normalized-difference spectral index");
    index->add_option("--raster", index_args.raster_stem, "Multiband raster stem")->required();
    index->add_option("--formula", index_args.formula, "Index formula")->capture_default_str();
    index->add_option("--nir", index_args.nir_band, "NIR band number (1-based)")->required();
    index->add_option("--red", index_args.red_band, "Red band number (1-based)")->required();
    index->add_option("--out", index_args.out_stem, "Output raster stem")->required();

    AssessArgs assess_args;
    auto* assess = app.add_subcommand(
        "assess", "Confusion matrix and accuracy report from paired sample files");
    assess->add_option("--ref", assess_args.ref_path, "Reference samples CSV")->required();
    assess->add_option("--pred", assess_args.pred_path, "Classified samples CSV")->required();
    assess->add_option("--legend", assess_args.legend_path, "Legend JSON");
    assess->add_option("--out", assess_args.out_path, "Output CSV (default stdout)");

    ChangeArgs change_args;
    auto* change = app.add_subcommand("change", "Class-area change across yearly class maps");
    change->add_option("--map", change_args.map_args, "Yearly map as <year>=<stem> (repeat)")
        ->required()
        ->expected(-2);
    change->add_option("--regions", change_args.regions_path,
                       "Regions JSON (default: whole extent)");
    change->add_option("--classes", change_args.classes_csv, "Focus classes, ids or names")
        ->capture_default_str();
    change->add_option("--legend", change_args.legend_path, "Legend JSON");
    change->add_option("--out", change_args.out_path, "Output CSV (default stdout)");

    ZonalArgs zonal_args;
    auto* zonal = app.add_subcommand("zonal", "Per-region class areas for one class map");
    zonal->add_option("--map", zonal_args.map_stem, "Class-map raster stem")->required();
    zonal->add_option("--regions", zonal_args.regions_path, "Regions JSON (default: whole extent)");
    zonal->add_option("--year", zonal_args.year, "Year tag for the output rows")->capture_default_str();
    zonal->add_option("--legend", zonal_args.legend_path, "Legend JSON");
    zonal->add_option("--workers", zonal_args.workers, "Region worker threads (default: all cores)");
    zonal->add_option("--out", zonal_args.out_path, "Output CSV (default stdout)");

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Render SVG bar charts from a change report");
    report->add_option("--change", report_args.change_path, "Change report CSV")->required();
    report->add_option("--class", report_args.class_token, "Focus class name or id")->required();
    report->add_option("--legend", report_args.legend_path, "Legend JSON");
    report->add_option("--area-out", report_args.area_out, "Output SVG: first/last-year areas")
        ->required();
    report->add_option("--pct-out", report_args.pct_out, "Output SVG: percent change")->required();
    report->add_flag("--sort", report_args.sort_descending, "Sort regions by value, descending");

    FixtureArgs fixture_args;
    auto* fixture =
        app.add_subcommand("fixture", "Generate synthetic scenes and growth series (test support)");
    fixture->group("");  // hidden from help
    fixture->add_option("--spec", fixture_args.spec_path, "Scene spec JSON")->required();
    fixture->add_option("--out-raster", fixture_args.out_raster, "Output scene raster stem");
    fixture->add_option("--out-truth", fixture_args.out_truth, "Output ground-truth map stem");
    fixture->add_option("--series-years", fixture_args.series_years, "Years of growth series");
    fixture->add_option("--growth-class", fixture_args.growth_class, "Growing class id")
        ->capture_default_str();
    fixture->add_option("--growth-px", fixture_args.growth_px, "Growth margin px/side/year")
        ->capture_default_str();
    fixture->add_option("--start-year", fixture_args.start_year, "First year of the series")
        ->capture_default_str();
    fixture->add_option("--out-dir", fixture_args.out_dir, "Output directory for yearly maps");

    try {
        app.parse(argc, argv);
        if (sample->parsed()) return cmd_sample(sample_args);
        if (train->parsed()) return cmd_train(train_args);
        if (classify->parsed()) return cmd_classify(classify_args);
        if (index->parsed()) return cmd_index(index_args);
        if (assess->parsed()) return cmd_assess(assess_args);
        if (change->parsed()) return cmd_change(change_args);
        if (zonal->parsed()) return cmd_zonal(zonal_args);
        if (report->parsed()) return cmd_report(report_args);
        if (fixture->parsed()) return cmd_fixture(fixture_args);
        return 1;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("lulc");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace lulc::cli
