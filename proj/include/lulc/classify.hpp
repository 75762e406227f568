#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lulc/raster.hpp"

namespace lulc {

// Appends (nir - red) / (nir + red) as an extra feature column; zero-based
// band indices into the source raster.
struct NdviFeature {
    int nir_band = 0;
    int red_band = 0;
    bool operator==(const NdviFeature&) const = default;
};

// Design matrix: one row per training sample, one column per feature (raster
// band, plus the optional appended NDVI column).
struct FeatureMatrix {
    Eigen::MatrixXd features;
    std::vector<int> labels;
    std::vector<std::string> feature_names;
    std::optional<NdviFeature> ndvi_feature;
};

struct ExtractReport {
    std::vector<std::size_t> out_of_extent;  // indices of skipped samples
    std::size_t nodata_skipped = 0;
};

// Row i holds the band vector at the pixel containing sample i. Samples on
// nodata pixels are always skipped and counted in the report. Out-of-extent
// samples are skipped and reported by default; with strict=true the first
// one raises a ValidationError naming the sample. Throws TrainingError when
// nothing remains.
FeatureMatrix extract_training(const RasterGrid& raster,
                               const std::vector<LabeledSample>& samples,
                               ExtractReport* report = nullptr, bool strict = false,
                               const std::optional<NdviFeature>& append_ndvi = {});

// Per-class Gaussian parameters plus factored quantities used at predict
// time. The Cholesky factor is of the ridged covariance.
struct ClassGaussian {
    int class_id = 0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    double prior = 0.0;

    Eigen::MatrixXd chol_lower;
    double log_det = 0.0;
    double log_prior = 0.0;
};

// Trained Gaussian maximum-likelihood classifier state: per class a mean
// vector, a ridged covariance and a prior, plus the legend and feature names
// for provenance. Immutable and shareable across prediction workers.
class GaussianClassModel {
public:
    // require_normalized_priors: the standard invariant (priors sum to 1
    // within 1e-9). Tests exercising the prior-scaling invariance of the
    // argmax construct deliberately unnormalized models with this off.
    GaussianClassModel(ClassLegend legend, std::vector<std::string> feature_names,
                       std::vector<ClassGaussian> classes, double ridge,
                       std::optional<NdviFeature> ndvi_feature = {},
                       bool require_normalized_priors = true);

    const ClassLegend& legend() const { return legend_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<ClassGaussian>& classes() const { return classes_; }
    double ridge() const { return ridge_; }
    const std::optional<NdviFeature>& ndvi_feature() const { return ndvi_feature_; }
    int dimension() const { return static_cast<int>(feature_names_.size()); }

    // Gaussian log-density discriminant
    //   g_c(x) = ln pi_c - 1/2 ln|Sigma_c| - 1/2 (x-mu_c)^T Sigma_c^-1 (x-mu_c);
    // larger means more likely.
    double discriminant(const Eigen::VectorXd& x, int class_id) const;

    // Canonical JSON (sorted keys), lossless for every double field.
    std::string to_json() const;
    static GaussianClassModel from_json(const std::string& text);

private:
    ClassLegend legend_;
    std::vector<std::string> feature_names_;
    std::vector<ClassGaussian> classes_;  // sorted by class_id ascending
    double ridge_ = 0.0;
    std::optional<NdviFeature> ndvi_feature_;
};

// Data-driven default for the covariance ridge: 1e-6 times the mean of the
// per-class sample-covariance diagonals, floored at 1e-12 so zero-variance
// training data still factors.
double default_ridge(const FeatureMatrix& features);

// mu_c = class sample mean, Sigma_c = class sample covariance (n_c - 1
// denominator) + ridge * I, pi_c = n_c / n_total. Classes with fewer than
// bands+1 samples get a warning; classes with fewer than 2 are an error.
GaussianClassModel train_max_likelihood(const FeatureMatrix& features, double ridge,
                                        const ClassLegend& legend,
                                        std::vector<std::string>* warnings = nullptr);

// argmax_c g_c(x) per pixel, ties to the lowest class_id; nodata pixels stay
// nodata (class-map value 0). workers <= 1 runs single-threaded; prediction
// partitions by row blocks and its output is identical for any worker count.
ClassMap predict(const GaussianClassModel& model, const RasterGrid& raster, int workers = 1);

// Brute-force k-nearest-neighbor vote over the training rows, used as an
// independent cross-check of the parametric classifier. k must be odd.
// Neighbor and vote ties resolve to the lowest class_id.
ClassMap knn_predict(const FeatureMatrix& features, const RasterGrid& raster, int k,
                     const ClassLegend& legend);

}  // namespace lulc
