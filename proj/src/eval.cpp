#include "tagsense/eval.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace tagsense {

ConfusionMatrix::ConfusionMatrix(std::vector<MaterialClass> classes)
    : classes_(std::move(classes)),
      counts_(classes_.size(), std::vector<std::int64_t>(classes_.size(), 0)) {
    if (classes_.empty()) {
        throw std::invalid_argument("confusion matrix needs at least one class");
    }
}

void ConfusionMatrix::add(MaterialClass truth, MaterialClass predicted) {
    const auto t = static_cast<std::size_t>(class_output_index(classes_, truth));
    const auto p = static_cast<std::size_t>(class_output_index(classes_, predicted));
    ++counts_[t][p];
}

std::int64_t ConfusionMatrix::at(std::size_t true_idx, std::size_t pred_idx) const {
    return counts_.at(true_idx).at(pred_idx);
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t sum = 0;
    for (const auto& row : counts_) {
        for (const auto v : row) sum += v;
    }
    return sum;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < counts_.size(); ++i) sum += counts_[i][i];
    return sum;
}

std::vector<std::int64_t> ConfusionMatrix::row_sums() const {
    std::vector<std::int64_t> sums(counts_.size(), 0);
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        for (const auto v : counts_[i]) sums[i] += v;
    }
    return sums;
}

std::vector<std::int64_t> ConfusionMatrix::column_sums() const {
    std::vector<std::int64_t> sums(counts_.size(), 0);
    for (const auto& row : counts_) {
        for (std::size_t j = 0; j < row.size(); ++j) sums[j] += row[j];
    }
    return sums;
}

EvalResult evaluate(const Network& net, const std::vector<MaterialClass>& classes,
                    const std::vector<LabeledSample>& test_set) {
    if (test_set.empty()) {
        throw std::invalid_argument("test set must be non-empty");
    }
    if (static_cast<int>(classes.size()) != net.spec.output_dim) {
        throw std::invalid_argument("class list size does not match network output_dim");
    }

    ConfusionMatrix cm(classes);
    for (const auto& sample : test_set) {
        const auto [pred_idx, probs] = predict(net, sample.features.values);
        cm.add(sample.label, classes[static_cast<std::size_t>(pred_idx)]);
    }
    const double accuracy =
        static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
    return EvalResult{accuracy, std::move(cm)};
}

std::vector<ClassMetrics> per_class_report(const ConfusionMatrix& cm) {
    const auto rows = cm.row_sums();
    const auto cols = cm.column_sums();

    std::vector<ClassMetrics> report;
    report.reserve(cm.size());
    for (std::size_t k = 0; k < cm.size(); ++k) {
        ClassMetrics m;
        m.material = cm.classes()[k];
        const double tp = static_cast<double>(cm.at(k, k));

        if (cols[k] > 0) {
            m.precision = tp / static_cast<double>(cols[k]);
        } else {
            m.precision = 0.0;
            m.precision_defined = false;
        }
        if (rows[k] > 0) {
            m.recall = tp / static_cast<double>(rows[k]);
        } else {
            m.recall = 0.0;
            m.recall_defined = false;
        }
        if (m.precision + m.recall > 0.0) {
            m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
        } else {
            m.f1 = 0.0;
            m.f1_defined = false;
        }
        report.push_back(m);
    }
    return report;
}

namespace {

std::string pad_left(const std::string& text, std::size_t width) {
    if (text.size() >= width) return text;
    return std::string(width - text.size(), ' ') + text;
}

}  // namespace

std::string render_table(const ConfusionMatrix& cm, bool row_normalized) {
    const std::size_t k = cm.size();
    std::size_t width = 8;
    for (const MaterialClass c : cm.classes()) {
        width = std::max(width, std::string(to_string(c)).size() + 2);
    }

    std::string out = pad_left("true\\pred", width);
    for (const MaterialClass c : cm.classes()) {
        out += pad_left(std::string(to_string(c)), width);
    }
    out += '\n';

    const auto rows = cm.row_sums();
    for (std::size_t i = 0; i < k; ++i) {
        out += pad_left(std::string(to_string(cm.classes()[i])), width);
        for (std::size_t j = 0; j < k; ++j) {
            if (row_normalized) {
                const double pct =
                    rows[i] > 0 ? 100.0 * static_cast<double>(cm.at(i, j)) /
                                      static_cast<double>(rows[i])
                                : 0.0;
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.1f%%", pct);
                out += pad_left(buf, width);
            } else {
                out += pad_left(std::to_string(cm.at(i, j)), width);
            }
        }
        out += '\n';
    }
    return out;
}

std::string render_class_report(const std::vector<ClassMetrics>& report) {
    std::string out = pad_left("class", 14) + pad_left("precision", 11) +
                      pad_left("recall", 11) + pad_left("f1", 11) + '\n';
    for (const ClassMetrics& m : report) {
        char buf[64];
        out += pad_left(std::string(to_string(m.material)), 14);
        std::snprintf(buf, sizeof(buf), "%.4f%s", m.precision,
                      m.precision_defined ? "" : "*");
        out += pad_left(buf, 11);
        std::snprintf(buf, sizeof(buf), "%.4f%s", m.recall, m.recall_defined ? "" : "*");
        out += pad_left(buf, 11);
        std::snprintf(buf, sizeof(buf), "%.4f%s", m.f1, m.f1_defined ? "" : "*");
        out += pad_left(buf, 11);
        out += '\n';
    }
    if (!report.empty()) {
        out += "(* marks 0/0 ratios reported as 0)\n";
    }
    return out;
}

void write_confusion_csv(const ConfusionMatrix& cm, std::ostream& out) {
    out << "true\\pred";
    for (const MaterialClass c : cm.classes()) out << ',' << to_string(c);
    out << '\n';
    for (std::size_t i = 0; i < cm.size(); ++i) {
        out << to_string(cm.classes()[i]);
        for (std::size_t j = 0; j < cm.size(); ++j) out << ',' << cm.at(i, j);
        out << '\n';
    }
}

}  // namespace tagsense
