#include "eegnet/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "eegnet/error.hpp"

namespace eegnet {

std::uint64_t ConfusionMatrix::total() const noexcept {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    return n;
}

std::uint64_t ConfusionMatrix::false_positives(std::size_t c) const {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < classes; ++i) {
        if (i != c) n += at(i, c);
    }
    return n;
}

std::uint64_t ConfusionMatrix::false_negatives(std::size_t c) const {
    std::uint64_t n = 0;
    for (std::size_t j = 0; j < classes; ++j) {
        if (j != c) n += at(c, j);
    }
    return n;
}

ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels, std::size_t classes,
                                 std::vector<std::string> class_names) {
    if (classes < 2) throw InvalidArgument("confusion matrix needs at least 2 classes");
    if (predictions.size() != labels.size()) {
        throw InvalidArgument("confusion matrix: " + std::to_string(predictions.size()) + " predictions vs " +
                              std::to_string(labels.size()) + " labels");
    }
    if (class_names.empty()) {
        for (std::size_t c = 0; c < classes; ++c) class_names.push_back(std::to_string(c));
    }
    if (class_names.size() != classes) throw InvalidArgument("confusion matrix: class name count mismatch");

    ConfusionMatrix cm{classes, std::vector<std::uint64_t>(classes * classes, 0), std::move(class_names)};
    const auto in_range = [classes](int v) { return v >= 0 && static_cast<std::size_t>(v) < classes; };
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!in_range(predictions[i]) || !in_range(labels[i])) {
            throw InvalidArgument("confusion matrix: entry " + std::to_string(i) + " outside [0, " +
                                  std::to_string(classes) + ")");
        }
        ++cm.counts[static_cast<std::size_t>(labels[i]) * classes + static_cast<std::size_t>(predictions[i])];
    }
    return cm;
}

namespace {

double ratio(std::uint64_t num, std::uint64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<double> specificity_per_class(const ConfusionMatrix& cm) {
    std::vector<double> out;
    for (std::size_t c = 0; c < cm.classes; ++c) {
        const auto tp = cm.true_positives(c);
        out.push_back(ratio(tp, tp + cm.false_positives(c)));
    }
    return out;
}

std::vector<double> sensitivity_per_class(const ConfusionMatrix& cm) {
    std::vector<double> out;
    for (std::size_t c = 0; c < cm.classes; ++c) {
        const auto tp = cm.true_positives(c);
        out.push_back(ratio(tp, tp + cm.false_negatives(c)));
    }
    return out;
}

double f1_score(double specificity, double sensitivity) {
    const double den = specificity + sensitivity;
    return den == 0.0 ? 0.0 : 2.0 * specificity * sensitivity / den;
}

std::vector<double> f1_per_class(const ConfusionMatrix& cm) {
    const auto spec = specificity_per_class(cm);
    const auto sens = sensitivity_per_class(cm);
    std::vector<double> out;
    for (std::size_t c = 0; c < cm.classes; ++c) out.push_back(f1_score(spec[c], sens[c]));
    return out;
}

namespace {

// Sums in ascending order so the macro mean does not depend on class order.
double macro_mean(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

}  // namespace

ClassificationReport classification_report(const ConfusionMatrix& cm) {
    const auto spec = specificity_per_class(cm);
    const auto sens = sensitivity_per_class(cm);
    const auto f1 = f1_per_class(cm);
    ClassificationReport r;
    r.average.name = "average";
    std::uint64_t correct = 0;
    for (std::size_t c = 0; c < cm.classes; ++c) {
        std::uint64_t support = 0;
        for (std::size_t j = 0; j < cm.classes; ++j) support += cm.at(c, j);
        r.rows.push_back({cm.class_names[c], spec[c], sens[c], f1[c], support});
        r.average.support += support;
        correct += cm.true_positives(c);
    }
    r.average.specificity = macro_mean(spec);
    r.average.sensitivity = macro_mean(sens);
    r.average.f1 = macro_mean(f1);
    r.accuracy = ratio(correct, r.average.support);
    return r;
}

std::string render_text(const ClassificationReport& report) {
    std::size_t width = std::string("average").size();
    for (const auto& row : report.rows) width = std::max(width, row.name.size());

    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s  %24s  %24s  %8s  %8s\n", static_cast<int>(width), "class",
                  "specificity (precision)", "sensitivity (recall)", "f1", "support");
    out += buf;
    auto line = [&](const ReportRow& row) {
        std::snprintf(buf, sizeof buf, "%-*s  %24.4f  %24.4f  %8.4f  %8llu\n", static_cast<int>(width),
                      row.name.c_str(), row.specificity, row.sensitivity, row.f1,
                      static_cast<unsigned long long>(row.support));
        out += buf;
    };
    for (const auto& row : report.rows) line(row);
    out += "\n";
    line(report.average);
    std::snprintf(buf, sizeof buf, "\naccuracy %.4f\n", report.accuracy);
    out += buf;
    return out;
}

nlohmann::json render_json(const ClassificationReport& report) {
    auto object = [](const ReportRow& row) {
        return nlohmann::json{{"class", row.name},
                              {"specificity", row.specificity},
                              {"sensitivity", row.sensitivity},
                              {"f1", row.f1},
                              {"support", row.support}};
    };
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& row : report.rows) doc.push_back(object(row));
    doc.push_back(object(report.average));
    return doc;
}

}  // namespace eegnet
