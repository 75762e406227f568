#include "lulc/accuracy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lulc/text.hpp"

namespace lulc {

ConfusionMatrix::ConfusionMatrix(ClassLegend legend)
    : legend_(std::move(legend)),
      counts_(legend_.size(), std::vector<std::int64_t>(legend_.size(), 0)) {
    if (legend_.size() == 0) throw ValidationError("confusion matrix needs a nonempty legend");
}

ConfusionMatrix::ConfusionMatrix(ClassLegend legend, std::vector<std::vector<std::int64_t>> counts)
    : legend_(std::move(legend)), counts_(std::move(counts)) {
    if (legend_.size() == 0) throw ValidationError("confusion matrix needs a nonempty legend");
    if (counts_.size() != legend_.size())
        throw ValidationError("confusion matrix counts must be K x K for a K-class legend");
    for (const auto& row : counts_) {
        if (row.size() != legend_.size())
            throw ValidationError("confusion matrix counts must be K x K for a K-class legend");
        for (const std::int64_t c : row) {
            if (c < 0) throw ValidationError("confusion matrix counts must be non-negative");
        }
    }
}

ConfusionMatrix ConfusionMatrix::from_labels(const std::vector<int>& reference,
                                             const std::vector<int>& predicted,
                                             const ClassLegend& legend) {
    if (reference.size() != predicted.size())
        throw ValidationError("reference and predicted label lists differ in length (" +
                              std::to_string(reference.size()) + " vs " +
                              std::to_string(predicted.size()) + ")");
    ConfusionMatrix cm(legend);
    for (std::size_t i = 0; i < reference.size(); ++i)
        cm.add(reference[i], predicted[i]);
    return cm;
}

std::int64_t ConfusionMatrix::count(std::size_t ref_index, std::size_t pred_index) const {
    if (ref_index >= size() || pred_index >= size())
        throw IndexError("confusion matrix index out of range");
    return counts_[ref_index][pred_index];
}

void ConfusionMatrix::add(int ref_id, int pred_id, std::int64_t n) {
    counts_[legend_.index_of(ref_id)][legend_.index_of(pred_id)] += n;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t ref_index) const {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < size(); ++j) s += count(ref_index, j);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t pred_index) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += count(i, pred_index);
    return s;
}

std::int64_t ConfusionMatrix::grand_total() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += row_sum(i);
    return s;
}

std::int64_t ConfusionMatrix::diagonal_sum() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < size(); ++i) s += count(i, i);
    return s;
}

double overall_accuracy(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.grand_total();
    if (total == 0) throw MetricError("overall accuracy undefined for an empty matrix");
    return static_cast<double>(cm.diagonal_sum()) / static_cast<double>(total);
}

double producers_accuracy(const ConfusionMatrix& cm, int class_id) {
    const std::size_t i = cm.legend().index_of(class_id);
    const std::int64_t ref_total = cm.row_sum(i);
    if (ref_total == 0)
        throw MetricError("producer's accuracy undefined for class '" +
                          cm.legend().name_of(class_id) + "': reference total is zero");
    return static_cast<double>(cm.count(i, i)) / static_cast<double>(ref_total);
}

double users_accuracy(const ConfusionMatrix& cm, int class_id) {
    const std::size_t i = cm.legend().index_of(class_id);
    const std::int64_t cls_total = cm.col_sum(i);
    if (cls_total == 0)
        throw MetricError("user's accuracy undefined for class '" +
                          cm.legend().name_of(class_id) + "': classified total is zero");
    return static_cast<double>(cm.count(i, i)) / static_cast<double>(cls_total);
}

double kappa(const ConfusionMatrix& cm) {
    const std::int64_t total = cm.grand_total();
    if (total == 0) throw MetricError("kappa undefined for an empty matrix");
    const double n = static_cast<double>(total);
    const double p_o = static_cast<double>(cm.diagonal_sum()) / n;
    double p_e = 0.0;
    for (std::size_t i = 0; i < cm.size(); ++i)
        p_e += static_cast<double>(cm.row_sum(i)) * static_cast<double>(cm.col_sum(i)) / (n * n);
    if (p_e == 1.0) throw MetricError("kappa undefined: expected agreement is 1");
    return (p_o - p_e) / (1.0 - p_e);
}

int percent_round_half_up(double fraction) {
    return static_cast<int>(std::floor(fraction * 100.0 + 0.5));
}

void write_accuracy_report_csv(const ConfusionMatrix& cm, std::ostream& out) {
    out << "class,reference_total,classified_total,number_correct,producer_pct,user_pct\n";
    for (std::size_t i = 0; i < cm.size(); ++i) {
        const auto& [id, name] = cm.legend().entries()[i];
        const std::int64_t ref_total = cm.row_sum(i);
        const std::int64_t cls_total = cm.col_sum(i);
        out << name << ',' << ref_total << ',' << cls_total << ',' << cm.count(i, i) << ',';
        if (ref_total > 0)
            out << percent_round_half_up(producers_accuracy(cm, id));
        else
            out << "n/a";
        out << ',';
        if (cls_total > 0)
            out << percent_round_half_up(users_accuracy(cm, id));
        else
            out << "n/a";
        out << '\n';
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", overall_accuracy(cm));
    out << "overall_accuracy," << buf << ",,,,\n";
    std::snprintf(buf, sizeof(buf), "%.6f", kappa(cm));
    out << "kappa," << buf << ",,,,\n";
}

void write_accuracy_report_csv(const ConfusionMatrix& cm, const std::filesystem::path& path) {
    std::ostringstream buf;
    write_accuracy_report_csv(cm, buf);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    const std::string s = std::move(buf).str();
    f.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!f) throw IoError("write failed for " + path.string());
}

}  // namespace lulc
