#include "lulc/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include <json.hpp>

namespace lulc {

namespace {

using nlohmann::json;

std::map<int, std::vector<Eigen::Index>> rows_by_class(const FeatureMatrix& features) {
    std::map<int, std::vector<Eigen::Index>> groups;
    for (std::size_t i = 0; i < features.labels.size(); ++i)
        groups[features.labels[i]].push_back(static_cast<Eigen::Index>(i));
    return groups;
}

double ndvi_from_bands(double nir, double red) {
    const double denom = nir + red;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (nir - red) / denom;
}

}  // namespace

FeatureMatrix extract_training(const RasterGrid& raster,
                               const std::vector<LabeledSample>& samples,
                               ExtractReport* report, bool strict,
                               const std::optional<NdviFeature>& append_ndvi) {
    if (append_ndvi) {
        if (append_ndvi->nir_band < 0 || append_ndvi->nir_band >= raster.band_count() ||
            append_ndvi->red_band < 0 || append_ndvi->red_band >= raster.band_count())
            throw IndexError("NDVI feature band index out of range");
    }

    const int nb = raster.band_count();
    const int dim = nb + (append_ndvi ? 1 : 0);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    ExtractReport local;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        const auto px = raster.map_to_pixel(s.x, s.y);
        if (!px) {
            if (strict)
                throw ValidationError("sample " + std::to_string(i) + " at (" +
                                      std::to_string(s.x) + ", " + std::to_string(s.y) +
                                      ") lies outside the raster extent");
            local.out_of_extent.push_back(i);
            continue;
        }
        if (!raster.pixel_valid(px->col, px->row)) {
            ++local.nodata_skipped;
            continue;
        }
        std::vector<double> row(static_cast<std::size_t>(dim));
        for (int b = 0; b < nb; ++b) row[static_cast<std::size_t>(b)] = raster.value(b, px->col, px->row);
        if (append_ndvi) {
            const double nd = ndvi_from_bands(row[static_cast<std::size_t>(append_ndvi->nir_band)],
                                              row[static_cast<std::size_t>(append_ndvi->red_band)]);
            if (std::isnan(nd)) {
                ++local.nodata_skipped;
                continue;
            }
            row.back() = nd;
        }
        rows.push_back(std::move(row));
        labels.push_back(s.class_id);
    }

    if (report) *report = local;
    if (rows.empty())
        throw TrainingError("no usable training samples: " +
                            std::to_string(local.out_of_extent.size()) + " outside extent, " +
                            std::to_string(local.nodata_skipped) + " on nodata pixels");

    FeatureMatrix fm;
    fm.features.resize(static_cast<Eigen::Index>(rows.size()), dim);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < dim; ++j)
            fm.features(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    fm.labels = std::move(labels);
    fm.feature_names = raster.band_names();
    fm.ndvi_feature = append_ndvi;
    if (append_ndvi)
        fm.feature_names.push_back("ndvi(" + raster.band_names()[static_cast<std::size_t>(append_ndvi->nir_band)] +
                                   "," + raster.band_names()[static_cast<std::size_t>(append_ndvi->red_band)] + ")");
    return fm;
}

GaussianClassModel::GaussianClassModel(ClassLegend legend,
                                       std::vector<std::string> feature_names,
                                       std::vector<ClassGaussian> classes, double ridge,
                                       std::optional<NdviFeature> ndvi_feature,
                                       bool require_normalized_priors)
    : legend_(std::move(legend)),
      feature_names_(std::move(feature_names)),
      classes_(std::move(classes)),
      ridge_(ridge),
      ndvi_feature_(ndvi_feature) {
    if (classes_.empty()) throw TrainingError("model has no trained classes");
    if (feature_names_.empty()) throw ValidationError("model needs at least one feature");
    if (ridge_ < 0.0) throw ValidationError("ridge must be non-negative");

    std::sort(classes_.begin(), classes_.end(),
              [](const ClassGaussian& a, const ClassGaussian& b) { return a.class_id < b.class_id; });

    const auto dim = static_cast<Eigen::Index>(feature_names_.size());
    double prior_sum = 0.0;
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        auto& c = classes_[i];
        if (i > 0 && classes_[i - 1].class_id == c.class_id)
            throw ValidationError("duplicate class id " + std::to_string(c.class_id) + " in model");
        if (!legend_.contains(c.class_id))
            throw ValidationError("model class id " + std::to_string(c.class_id) +
                                  " not present in legend");
        if (c.mean.size() != dim || c.covariance.rows() != dim || c.covariance.cols() != dim)
            throw ValidationError("model parameter dimensions do not match feature count");
        if (!c.mean.allFinite() || !c.covariance.allFinite())
            throw ValidationError("model parameters must be finite");
        if (!(c.prior > 0.0)) throw ValidationError("class priors must be positive");
        const double asym = (c.covariance - c.covariance.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * (1.0 + c.covariance.cwiseAbs().maxCoeff()))
            throw ValidationError("covariance of class " + std::to_string(c.class_id) +
                                  " is not symmetric");
        prior_sum += c.prior;

        Eigen::LLT<Eigen::MatrixXd> llt(c.covariance.selfadjointView<Eigen::Lower>());
        if (llt.info() != Eigen::Success)
            throw TrainingError("covariance of class '" + legend_.name_of(c.class_id) +
                                "' is not positive definite after ridge regularization");
        c.chol_lower = llt.matrixL();
        c.log_det = 2.0 * c.chol_lower.diagonal().array().log().sum();
        c.log_prior = std::log(c.prior);
    }
    if (require_normalized_priors && std::abs(prior_sum - 1.0) > 1e-9)
        throw ValidationError("class priors must sum to 1");
}

double GaussianClassModel::discriminant(const Eigen::VectorXd& x, int class_id) const {
    if (x.size() != static_cast<Eigen::Index>(feature_names_.size()))
        throw ValidationError("feature vector dimension does not match model");
    if (!x.allFinite()) throw ValidationError("feature vector must be finite");
    for (const auto& c : classes_) {
        if (c.class_id != class_id) continue;
        Eigen::VectorXd v = x - c.mean;
        c.chol_lower.triangularView<Eigen::Lower>().solveInPlace(v);
        return c.log_prior - 0.5 * c.log_det - 0.5 * v.squaredNorm();
    }
    throw ValidationError("class id " + std::to_string(class_id) + " not present in model");
}

double default_ridge(const FeatureMatrix& features) {
    const auto groups = rows_by_class(features);
    const Eigen::Index dim = features.features.cols();
    double diag_sum = 0.0;
    std::size_t diag_n = 0;
    for (const auto& [id, rows] : groups) {
        if (rows.size() < 2) continue;
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
        for (const auto r : rows) mean += features.features.row(r).transpose();
        mean /= static_cast<double>(rows.size());
        for (Eigen::Index j = 0; j < dim; ++j) {
            double ss = 0.0;
            for (const auto r : rows) {
                const double d = features.features(r, j) - mean(j);
                ss += d * d;
            }
            diag_sum += ss / static_cast<double>(rows.size() - 1);
            ++diag_n;
        }
    }
    if (diag_n == 0) return 1e-12;
    return std::max(1e-6 * diag_sum / static_cast<double>(diag_n), 1e-12);
}

GaussianClassModel train_max_likelihood(const FeatureMatrix& features, double ridge,
                                        const ClassLegend& legend,
                                        std::vector<std::string>* warnings) {
    const Eigen::Index n = features.features.rows();
    const Eigen::Index dim = features.features.cols();
    if (n == 0) throw TrainingError("training set is empty");
    if (static_cast<std::size_t>(n) != features.labels.size())
        throw ValidationError("feature matrix and label list differ in length");
    if (!features.features.allFinite())
        throw ValidationError("training features must be finite");
    if (ridge < 0.0) throw ValidationError("ridge must be non-negative");

    const auto groups = rows_by_class(features);
    std::vector<ClassGaussian> classes;
    for (const auto& [class_id, rows] : groups) {
        if (!legend.contains(class_id))
            throw ValidationError("training label " + std::to_string(class_id) +
                                  " not present in legend");
        const auto n_c = static_cast<Eigen::Index>(rows.size());
        if (n_c < 2)
            throw TrainingError("class '" + legend.name_of(class_id) + "' has only " +
                                std::to_string(rows.size()) +
                                " training samples; at least 2 are required");
        if (n_c < dim + 1 && warnings)
            warnings->push_back("class '" + legend.name_of(class_id) + "' has " +
                                std::to_string(rows.size()) + " samples for " +
                                std::to_string(dim) +
                                " features; covariance may be ill-conditioned");

        Eigen::MatrixXd sub(n_c, dim);
        for (Eigen::Index i = 0; i < n_c; ++i)
            sub.row(i) = features.features.row(rows[static_cast<std::size_t>(i)]);

        ClassGaussian g;
        g.class_id = class_id;
        g.mean = sub.colwise().mean().transpose();
        const Eigen::MatrixXd centered = sub.rowwise() - g.mean.transpose();
        Eigen::MatrixXd cov =
            (centered.transpose() * centered) / static_cast<double>(n_c - 1);
        cov = ((cov + cov.transpose()) * 0.5).eval();
        cov.diagonal().array() += ridge;
        g.covariance = std::move(cov);
        g.prior = static_cast<double>(n_c) / static_cast<double>(n);
        classes.push_back(std::move(g));
    }

    return GaussianClassModel(legend, features.feature_names, std::move(classes), ridge,
                              features.ndvi_feature);
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_to_json_row_major(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) arr.push_back(m(r, c));
    return arr;
}

}  // namespace

std::string GaussianClassModel::to_json() const {
    json doc;
    doc["band_names"] = feature_names_;
    doc["ridge"] = ridge_;
    if (ndvi_feature_)
        doc["ndvi_feature"] = {{"nir", ndvi_feature_->nir_band}, {"red", ndvi_feature_->red_band}};
    else
        doc["ndvi_feature"] = nullptr;
    json legend = json::array();
    for (const auto& [id, name] : legend_.entries())
        legend.push_back({{"id", id}, {"name", name}});
    doc["legend"] = std::move(legend);
    json classes = json::array();
    for (const auto& c : classes_) {
        classes.push_back({{"class_id", c.class_id},
                           {"mean", vector_to_json(c.mean)},
                           {"covariance", matrix_to_json_row_major(c.covariance)},
                           {"prior", c.prior}});
    }
    doc["classes"] = std::move(classes);
    return doc.dump(2) + "\n";
}

GaussianClassModel GaussianClassModel::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("model is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("classes") || !doc.contains("band_names") ||
        !doc.contains("legend") || !doc.contains("ridge") || !doc.contains("ndvi_feature"))
        throw FormatError("model JSON is missing required keys");

    std::vector<std::pair<int, std::string>> entries;
    for (const auto& e : doc["legend"])
        entries.emplace_back(e.at("id").get<int>(), e.at("name").get<std::string>());
    ClassLegend legend(std::move(entries));

    std::vector<std::string> feature_names = doc["band_names"].get<std::vector<std::string>>();
    const auto dim = static_cast<Eigen::Index>(feature_names.size());

    std::vector<ClassGaussian> classes;
    for (const auto& jc : doc["classes"]) {
        ClassGaussian g;
        g.class_id = jc.at("class_id").get<int>();
        const auto mean = jc.at("mean").get<std::vector<double>>();
        const auto cov = jc.at("covariance").get<std::vector<double>>();
        if (mean.size() != static_cast<std::size_t>(dim) ||
            cov.size() != static_cast<std::size_t>(dim * dim))
            throw FormatError("model class " + std::to_string(g.class_id) +
                              " has parameter arrays of the wrong length");
        g.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), dim);
        g.covariance.resize(dim, dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            for (Eigen::Index c = 0; c < dim; ++c)
                g.covariance(r, c) = cov[static_cast<std::size_t>(r * dim + c)];
        g.prior = jc.at("prior").get<double>();
        classes.push_back(std::move(g));
    }

    std::optional<NdviFeature> ndvi;
    if (!doc["ndvi_feature"].is_null())
        ndvi = NdviFeature{doc["ndvi_feature"].at("nir").get<int>(),
                           doc["ndvi_feature"].at("red").get<int>()};

    return GaussianClassModel(std::move(legend), std::move(feature_names), std::move(classes),
                              doc["ridge"].get<double>(), ndvi);
}

namespace {

// Scores one pixel's feature vector against every class; ascending class_id
// iteration plus strict comparison makes ties resolve to the lowest id.
int argmax_class(const GaussianClassModel& model, const Eigen::VectorXd& x, Eigen::VectorXd& work) {
    double best = -std::numeric_limits<double>::infinity();
    int best_id = 0;
    bool first = true;
    for (const auto& c : model.classes()) {
        work = x - c.mean;
        c.chol_lower.triangularView<Eigen::Lower>().solveInPlace(work);
        const double score = c.log_prior - 0.5 * c.log_det - 0.5 * work.squaredNorm();
        if (first || score > best) {
            best = score;
            best_id = c.class_id;
            first = false;
        }
    }
    return best_id;
}

}  // namespace

ClassMap predict(const GaussianClassModel& model, const RasterGrid& raster, int workers) {
    const int nb = raster.band_count();
    const bool with_ndvi = model.ndvi_feature().has_value();
    const int dim = nb + (with_ndvi ? 1 : 0);
    if (dim != model.dimension())
        throw ValidationError("raster band count " + std::to_string(nb) +
                              " does not match model dimension " +
                              std::to_string(model.dimension()));
    if (with_ndvi) {
        if (model.ndvi_feature()->nir_band < 0 || model.ndvi_feature()->nir_band >= nb ||
            model.ndvi_feature()->red_band < 0 || model.ndvi_feature()->red_band >= nb)
            throw ValidationError("model NDVI feature references a band outside the raster");
    }

    const int w = raster.width();
    const int h = raster.height();
    std::vector<std::uint8_t> out(raster.pixel_count(), 0);

    const auto run_rows = [&](int row_begin, int row_end) {
        std::visit(
            [&](const auto& cells) {
                const auto& nodata = raster.nodata();
                Eigen::VectorXd x(dim), work(dim);
                const std::size_t plane = raster.pixel_count();
                for (int row = row_begin; row < row_end; ++row) {
                    const std::size_t row_off =
                        static_cast<std::size_t>(row) * static_cast<std::size_t>(w);
                    for (int col = 0; col < w; ++col) {
                        const std::size_t i = row_off + static_cast<std::size_t>(col);
                        bool valid = true;
                        for (int b = 0; b < nb; ++b) {
                            const double v = static_cast<double>(
                                cells[static_cast<std::size_t>(b) * plane + i]);
                            if (nodata && v == *nodata) {
                                valid = false;
                                break;
                            }
                            x(b) = v;
                        }
                        if (valid && with_ndvi) {
                            const double nd = ndvi_from_bands(x(model.ndvi_feature()->nir_band),
                                                              x(model.ndvi_feature()->red_band));
                            if (std::isnan(nd))
                                valid = false;
                            else
                                x(nb) = nd;
                        }
                        if (!valid) continue;  // stays nodata (0)
                        out[i] = static_cast<std::uint8_t>(argmax_class(model, x, work));
                    }
                }
            },
            raster.buffer());
    };

    const int n_workers = std::max(1, std::min(workers, h));
    if (n_workers == 1) {
        run_rows(0, h);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_workers));
        const int rows_per = (h + n_workers - 1) / n_workers;
        for (int t = 0; t < n_workers; ++t) {
            const int r0 = t * rows_per;
            const int r1 = std::min(h, r0 + rows_per);
            pool.emplace_back([&, t, r0, r1] {
                try {
                    if (r0 < r1) run_rows(r0, r1);
                } catch (...) {
                    errors[static_cast<std::size_t>(t)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    RasterGrid grid(w, h, 1, DataType::U8, raster.geotransform(), raster.crs_id(), 0.0,
                    {"class"}, std::move(out));
    return ClassMap(std::move(grid), model.legend());
}

ClassMap knn_predict(const FeatureMatrix& features, const RasterGrid& raster, int k,
                     const ClassLegend& legend) {
    const Eigen::Index n = features.features.rows();
    if (k < 1) throw ConfigError("k must be positive");
    if (k % 2 == 0) throw ConfigError("k must be odd to reduce vote ties");
    if (static_cast<Eigen::Index>(k) > n)
        throw ValidationError("k exceeds the training set size");
    if (features.features.cols() != raster.band_count())
        throw ValidationError("raster band count does not match training feature count");
    for (const int label : features.labels)
        if (!legend.contains(label))
            throw ValidationError("training label " + std::to_string(label) +
                                  " not present in legend");

    const int w = raster.width();
    const int h = raster.height();
    const int nb = raster.band_count();
    std::vector<std::uint8_t> out(raster.pixel_count(), 0);

    struct Neighbor {
        double dist2;
        int class_id;
        Eigen::Index row;
    };
    std::vector<Neighbor> neighbors(static_cast<std::size_t>(n));
    Eigen::VectorXd x(nb);

    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            if (!raster.pixel_valid(col, row)) continue;
            for (int b = 0; b < nb; ++b) x(b) = raster.value(b, col, row);
            for (Eigen::Index i = 0; i < n; ++i) {
                neighbors[static_cast<std::size_t>(i)] = {
                    (features.features.row(i).transpose() - x).squaredNorm(),
                    features.labels[static_cast<std::size_t>(i)], i};
            }
            std::partial_sort(neighbors.begin(), neighbors.begin() + k, neighbors.end(),
                              [](const Neighbor& a, const Neighbor& b) {
                                  if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
                                  if (a.class_id != b.class_id) return a.class_id < b.class_id;
                                  return a.row < b.row;
                              });
            std::map<int, int> votes;
            for (int i = 0; i < k; ++i) votes[neighbors[static_cast<std::size_t>(i)].class_id]++;
            int best_id = 0;
            int best_votes = -1;
            for (const auto& [id, v] : votes) {  // ascending id: ties go to the lowest
                if (v > best_votes) {
                    best_votes = v;
                    best_id = id;
                }
            }
            out[static_cast<std::size_t>(row) * static_cast<std::size_t>(w) +
                static_cast<std::size_t>(col)] = static_cast<std::uint8_t>(best_id);
        }
    }

    RasterGrid grid(w, h, 1, DataType::U8, raster.geotransform(), raster.crs_id(), 0.0,
                    {"class"}, std::move(out));
    return ClassMap(std::move(grid), legend);
}

}  // namespace lulc
