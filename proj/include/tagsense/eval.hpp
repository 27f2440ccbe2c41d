#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tagsense/domain.hpp"
#include "tagsense/mlp.hpp"

namespace tagsense {

// K x K count matrix, rows = true class, columns = predicted class, both in
// the order of the class list supplied at construction.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::vector<MaterialClass> classes);

    void add(MaterialClass truth, MaterialClass predicted);

    std::int64_t at(std::size_t true_idx, std::size_t pred_idx) const;
    std::size_t size() const { return classes_.size(); }
    const std::vector<MaterialClass>& classes() const { return classes_; }

    std::int64_t total() const;
    std::int64_t trace() const;
    std::vector<std::int64_t> row_sums() const;
    std::vector<std::int64_t> column_sums() const;

private:
    std::vector<MaterialClass> classes_;
    std::vector<std::vector<std::int64_t>> counts_;
};

struct EvalResult {
    double accuracy = 0.0;
    ConfusionMatrix confusion;
};

// Runs the network over a test set (features must already be standardized the
// same way as in training) and tallies predictions.
EvalResult evaluate(const Network& net, const std::vector<MaterialClass>& classes,
                    const std::vector<LabeledSample>& test_set);

struct ClassMetrics {
    MaterialClass material;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    // False when the corresponding ratio was 0/0 and reported as 0.
    bool precision_defined = true;
    bool recall_defined = true;
    bool f1_defined = true;
};

std::vector<ClassMetrics> per_class_report(const ConfusionMatrix& cm);

// Aligned text table of raw counts, or row-normalized percentages.
std::string render_table(const ConfusionMatrix& cm, bool row_normalized = false);
std::string render_class_report(const std::vector<ClassMetrics>& report);

// CSV: header row of predicted-class names, one row per true class.
void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out);

}  // namespace tagsense
