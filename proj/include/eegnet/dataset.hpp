#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eegnet/tensor.hpp"

namespace eegnet {

/// Samples per EEG segment in the UCI epileptic seizure recognition file.
constexpr std::size_t kSegmentLength = 178;

enum class Job {
    Binary,     // healthy (Z, O) vs. ictal (S)
    FiveClass,  // Z, O, N, D, S
};

std::string to_string(Job job);
/// Accepts "binary" and "multi" (alias "five").
Job job_from_string(const std::string& name);

/// Class names of the five-class labeling, index = label.
const std::vector<std::string>& five_class_names();
const std::vector<std::string>& binary_class_names();
std::size_t num_classes(Job job);

struct FeatureStats {
    std::vector<double> mean;
    std::vector<double> std;
    friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

/// Labeled segments stored row-major. May be empty.
struct Dataset {
    std::size_t length = kSegmentLength;
    std::vector<double> features;
    std::vector<int> labels;
    std::vector<std::string> ids;
    std::vector<std::string> class_names;
    std::optional<FeatureStats> stats;

    std::size_t size() const noexcept { return labels.size(); }
    bool empty() const noexcept { return labels.empty(); }
    std::size_t num_classes() const noexcept { return class_names.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(features).subspan(i * length, length);
    }
    /// [n, length]; throws ShapeError on an empty dataset.
    Tensor feature_tensor() const;
    Dataset subset(std::span<const std::size_t> indices) const;
    std::vector<std::size_t> class_counts() const;
};

/// Parses the UCI layout: a header line, then rows of
/// identifier, X1..X178, y with y in 1..5. Labels become five-class indices
/// via y=5 -> Z, 4 -> O, 3 -> N, 2 -> D, 1 -> S. Throws ParseError naming
/// the 1-based line of the first bad row.
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in);

/// Writes the same layout back, encoding labels in the UCI y convention
/// (binary datasets write healthy as 5 and seizure as 1). Values use the
/// shortest round-trip representation.
void write_csv(const Dataset& d, const std::filesystem::path& path);
void write_csv(const Dataset& d, std::ostream& out);

/// Unlabeled rows for prediction: header, then identifier + 178 values.
struct UnlabeledRows {
    std::vector<std::string> ids;
    std::vector<double> features;
    std::size_t length = kSegmentLength;
};
UnlabeledRows load_unlabeled_csv(const std::filesystem::path& path);
UnlabeledRows parse_unlabeled_csv(std::istream& in);

/// Throws InvalidArgument unless d carries the five-class labeling.
Dataset map_labels_for_job(const Dataset& d, Job job);

struct SplitSpec {
    double train_fraction = 0.76;
    double val_fraction = 0.12;
    double test_fraction = 0.12;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> val;
    std::vector<std::size_t> test;
};

/// Stratified split: each class is shuffled with its own seeded stream, then
/// takes floor(train * n_c) and floor(val * n_c) samples, the remainder going
/// to test. Index lists come back sorted. Throws StratificationError when a
/// class cannot put at least one sample in every partition.
SplitIndices split_indices(const Dataset& d, const SplitSpec& spec);

struct Split {
    Dataset train;
    Dataset val;
    Dataset test;
};
Split split(const Dataset& d, const SplitSpec& spec);

/// Per-feature mean and population std over the rows, std floored at 1e-8.
FeatureStats compute_stats(const Dataset& d);
/// (x - mean) / std per feature; records the stats on the result.
Dataset apply_stats(const Dataset& d, const FeatureStats& stats);
void apply_stats_inplace(std::span<double> features, std::size_t length, const FeatureStats& stats);

struct Standardized {
    Dataset train;
    std::vector<Dataset> others;
};
/// Fits stats on train only and applies them to every dataset.
Standardized standardize(const Dataset& train, const std::vector<Dataset>& others);

/// Offline surrogate for the UCI file: per class a noisy sinusoid with its
/// own frequency band and amplitude and a random phase. num_classes must be
/// 2 or 5; two-class data uses the binary class names.
Dataset synth_generate(std::uint64_t seed, std::size_t n_per_class, std::size_t num_classes);

}  // namespace eegnet
