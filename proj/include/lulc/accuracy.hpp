#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "lulc/raster.hpp"

namespace lulc {

// K x K reference-vs-classified counts. Rows are the reference class, columns
// the classified class, both in legend order; row sums are the reference
// totals, column sums the classified totals. The opposite orientation also
// circulates, so this convention is fixed here once.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(ClassLegend legend);
    ConfusionMatrix(ClassLegend legend, std::vector<std::vector<std::int64_t>> counts);

    static ConfusionMatrix from_labels(const std::vector<int>& reference,
                                       const std::vector<int>& predicted,
                                       const ClassLegend& legend);

    const ClassLegend& legend() const { return legend_; }
    std::size_t size() const { return legend_.size(); }

    std::int64_t count(std::size_t ref_index, std::size_t pred_index) const;
    void add(int ref_id, int pred_id, std::int64_t n = 1);

    std::int64_t row_sum(std::size_t ref_index) const;   // reference total
    std::int64_t col_sum(std::size_t pred_index) const;  // classified total
    std::int64_t grand_total() const;
    std::int64_t diagonal_sum() const;

private:
    ClassLegend legend_;
    std::vector<std::vector<std::int64_t>> counts_;
};

// trace / grand total. Throws MetricError when the grand total is zero.
double overall_accuracy(const ConfusionMatrix& cm);
// diagonal over the reference (row) total of class_id.
double producers_accuracy(const ConfusionMatrix& cm, int class_id);
// diagonal over the classified (column) total of class_id.
double users_accuracy(const ConfusionMatrix& cm, int class_id);
// Cohen's kappa: (p_o - p_e) / (1 - p_e) with p_e from the marginals.
double kappa(const ConfusionMatrix& cm);

// Integer percentage rendering, round half up (98/101 -> 97).
int percent_round_half_up(double fraction);

// CSV with columns class,reference_total,classified_total,number_correct,
// producer_pct,user_pct followed by overall_accuracy and kappa footer rows.
// Undefined per-class cells (zero marginal) render as "n/a".
void write_accuracy_report_csv(const ConfusionMatrix& cm, std::ostream& out);
void write_accuracy_report_csv(const ConfusionMatrix& cm, const std::filesystem::path& path);

}  // namespace lulc
