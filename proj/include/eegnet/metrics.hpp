#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace eegnet {

/// counts[i][j]: samples of true class i predicted as class j.
struct ConfusionMatrix {
    std::size_t classes = 0;
    std::vector<std::uint64_t> counts;  // row-major classes x classes
    std::vector<std::string> class_names;

    std::uint64_t at(std::size_t truth, std::size_t predicted) const { return counts[truth * classes + predicted]; }
    std::uint64_t total() const noexcept;
    std::uint64_t true_positives(std::size_t c) const { return at(c, c); }
    std::uint64_t false_positives(std::size_t c) const;
    std::uint64_t false_negatives(std::size_t c) const;
};

/// Throws InvalidArgument on a length mismatch, C < 2, or an entry outside
/// [0, C). Class names default to "0".."C-1".
ConfusionMatrix confusion_matrix(std::span<const int> predictions, std::span<const int> labels, std::size_t classes,
                                 std::vector<std::string> class_names = {});

// Per-class metrics. A zero denominator yields 0.

/// TP / (TP + FP). Printed as "specificity (precision)" in reports: this is
/// the precision formula under the name the EEG literature used.
std::vector<double> specificity_per_class(const ConfusionMatrix& cm);
/// TP / (TP + FN), i.e. recall.
std::vector<double> sensitivity_per_class(const ConfusionMatrix& cm);
/// Harmonic mean of the two above.
std::vector<double> f1_per_class(const ConfusionMatrix& cm);
double f1_score(double specificity, double sensitivity);

struct ReportRow {
    std::string name;
    double specificity = 0.0;
    double sensitivity = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ClassificationReport {
    std::vector<ReportRow> rows;
    ReportRow average;  // unweighted mean over classes, support = total
    double accuracy = 0.0;
    friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

ClassificationReport classification_report(const ConfusionMatrix& cm);

/// Aligned plain-text table.
std::string render_text(const ClassificationReport& report);

/// Array of {class, specificity, sensitivity, f1, support} objects, the last
/// one with class "average".
nlohmann::json render_json(const ClassificationReport& report);

}  // namespace eegnet
