#include "eegnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "eegnet/error.hpp"
#include "eegnet/rng.hpp"

namespace eegnet {

std::string to_string(Job job) {
    return job == Job::Binary ? "binary" : "multi";
}

Job job_from_string(const std::string& name) {
    if (name == "binary") return Job::Binary;
    if (name == "multi" || name == "five") return Job::FiveClass;
    throw InvalidArgument("unknown job '" + name + "' (expected binary or multi)");
}

const std::vector<std::string>& five_class_names() {
    static const std::vector<std::string> names = {"Z", "O", "N", "D", "S"};
    return names;
}

const std::vector<std::string>& binary_class_names() {
    static const std::vector<std::string> names = {"healthy", "seizure"};
    return names;
}

std::size_t num_classes(Job job) {
    return job == Job::Binary ? 2 : 5;
}

Tensor Dataset::feature_tensor() const {
    if (empty()) throw ShapeError("dataset is empty");
    return Tensor({size(), length}, features);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.length = length;
    out.class_names = class_names;
    out.stats = stats;
    out.features.reserve(indices.size() * length);
    for (auto i : indices) {
        const auto r = row(i);
        out.features.insert(out.features.end(), r.begin(), r.end());
        out.labels.push_back(labels[i]);
        out.ids.push_back(ids[i]);
    }
    return out;
}

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int y : labels) ++counts[static_cast<std::size_t>(y)];
    return counts;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
    double v = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end || field.empty() || !std::isfinite(v)) {
        throw ParseError("column " + std::to_string(column) + ": '" + std::string(field) + "' is not a finite number",
                         line);
    }
    return v;
}

int five_class_from_y(long y) {
    return static_cast<int>(5 - y);
}

long y_from_label(const Dataset& d, int label) {
    if (d.class_names == five_class_names()) return 5 - label;
    if (d.class_names == binary_class_names()) return label == 0 ? 5 : 1;
    throw InvalidArgument("write_csv: dataset labeling is neither five-class nor binary");
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

Dataset parse_csv(std::istream& in) {
    Dataset d;
    d.class_names = five_class_names();
    std::string line;
    std::size_t lineno = 0;
    const std::size_t columns = kSegmentLength + 2;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++lineno;
    if (split_fields(line).size() != columns) {
        throw ParseError("header has " + std::to_string(split_fields(line).size()) + " columns, expected " +
                             std::to_string(columns),
                         lineno);
    }
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != columns) {
            throw ParseError("row has " + std::to_string(fields.size()) + " columns, expected " + std::to_string(columns),
                             lineno);
        }
        d.ids.emplace_back(fields[0]);
        for (std::size_t j = 1; j <= kSegmentLength; ++j) d.features.push_back(parse_number(fields[j], lineno, j + 1));
        const double y = parse_number(fields.back(), lineno, columns);
        if (y != std::floor(y) || y < 1 || y > 5) {
            throw ParseError("label '" + std::string(fields.back()) + "' is not an integer in 1..5", lineno);
        }
        d.labels.push_back(five_class_from_y(static_cast<long>(y)));
    }
    return d;
}

Dataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return parse_csv(in);
}

void write_csv(const Dataset& d, std::ostream& out) {
    out << "id";
    for (std::size_t j = 1; j <= d.length; ++j) out << ",X" << j;
    out << ",y\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.ids[i];
        for (double v : d.row(i)) out << ',' << format_double(v);
        out << ',' << y_from_label(d, d.labels[i]) << '\n';
    }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    write_csv(d, out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

UnlabeledRows parse_unlabeled_csv(std::istream& in) {
    UnlabeledRows rows;
    std::string line;
    std::size_t lineno = 0;
    const std::size_t columns = kSegmentLength + 1;
    if (!std::getline(in, line)) throw ParseError("missing header", 1);
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != columns) {
            throw ParseError("row has " + std::to_string(fields.size()) + " columns, expected " +
                                 std::to_string(columns) + " (identifier + " + std::to_string(kSegmentLength) +
                                 " values)",
                             lineno);
        }
        rows.ids.emplace_back(fields[0]);
        for (std::size_t j = 1; j < columns; ++j) rows.features.push_back(parse_number(fields[j], lineno, j + 1));
    }
    return rows;
}

UnlabeledRows load_unlabeled_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    return parse_unlabeled_csv(in);
}

Dataset map_labels_for_job(const Dataset& d, Job job) {
    if (d.class_names != five_class_names()) {
        throw InvalidArgument("map_labels_for_job: dataset must carry the five-class labeling");
    }
    if (job == Job::FiveClass) return d;
    if (job != Job::Binary) throw InvalidArgument("map_labels_for_job: unknown job");

    // Z and O are healthy, S is ictal; N and D are left out.
    constexpr int kZ = 0, kO = 1, kS = 4;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const int y = d.labels[i];
        if (y == kZ || y == kO || y == kS) keep.push_back(i);
    }
    Dataset out = d.subset(keep);
    out.class_names = binary_class_names();
    for (auto& y : out.labels) y = (y == kS) ? 1 : 0;
    return out;
}

void SplitSpec::validate() const {
    if (!(train_fraction > 0 && val_fraction > 0 && test_fraction > 0)) {
        throw InvalidArgument("split fractions must be positive");
    }
    if (std::abs(train_fraction + val_fraction + test_fraction - 1.0) > 1e-9) {
        throw InvalidArgument("split fractions must sum to 1");
    }
}

SplitIndices split_indices(const Dataset& d, const SplitSpec& spec) {
    spec.validate();
    const std::size_t classes = d.num_classes();
    if (d.size() < classes) throw StratificationError("dataset smaller than the number of classes");

    std::vector<std::vector<std::size_t>> by_class(classes);
    for (std::size_t i = 0; i < d.size(); ++i) by_class[static_cast<std::size_t>(d.labels[i])].push_back(i);

    SplitIndices out;
    for (std::size_t c = 0; c < classes; ++c) {
        auto& idx = by_class[c];
        const std::size_t n = idx.size();
        // The epsilon keeps exact products such as 0.76 * 2300 from rounding down.
        const auto n_train = static_cast<std::size_t>(std::floor(spec.train_fraction * static_cast<double>(n) + 1e-9));
        const auto n_val = static_cast<std::size_t>(std::floor(spec.val_fraction * static_cast<double>(n) + 1e-9));
        if (n_train < 1 || n_val < 1 || n_train + n_val >= n) {
            throw StratificationError("class '" + d.class_names[c] + "' has " + std::to_string(n) +
                                      " samples, too few to place one in each partition");
        }
        Rng rng(spec.seed, c);
        rng.shuffle(std::span<std::size_t>(idx));
        out.train.insert(out.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        out.val.insert(out.val.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                       idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
        out.test.insert(out.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), idx.end());
    }
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.val.begin(), out.val.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

Split split(const Dataset& d, const SplitSpec& spec) {
    const auto idx = split_indices(d, spec);
    return {d.subset(idx.train), d.subset(idx.val), d.subset(idx.test)};
}

FeatureStats compute_stats(const Dataset& d) {
    if (d.empty()) throw InvalidArgument("cannot compute feature statistics of an empty dataset");
    const std::size_t n = d.size(), len = d.length;
    FeatureStats s{std::vector<double>(len, 0.0), std::vector<double>(len, 0.0)};
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = d.row(i);
        for (std::size_t j = 0; j < len; ++j) s.mean[j] += r[j];
    }
    for (auto& m : s.mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = d.row(i);
        for (std::size_t j = 0; j < len; ++j) {
            const double dv = r[j] - s.mean[j];
            s.std[j] += dv * dv;
        }
    }
    for (auto& v : s.std) v = std::max(std::sqrt(v / static_cast<double>(n)), 1e-8);
    return s;
}

void apply_stats_inplace(std::span<double> features, std::size_t length, const FeatureStats& stats) {
    if (stats.mean.size() != length || stats.std.size() != length) {
        throw ShapeError("feature statistics cover " + std::to_string(stats.mean.size()) + " features, data has " +
                         std::to_string(length));
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const std::size_t j = i % length;
        features[i] = (features[i] - stats.mean[j]) / stats.std[j];
    }
}

Dataset apply_stats(const Dataset& d, const FeatureStats& stats) {
    Dataset out = d;
    apply_stats_inplace(out.features, out.length, stats);
    out.stats = stats;
    return out;
}

Standardized standardize(const Dataset& train, const std::vector<Dataset>& others) {
    const FeatureStats stats = compute_stats(train);
    Standardized out{apply_stats(train, stats), {}};
    for (const auto& d : others) out.others.push_back(apply_stats(d, stats));
    return out;
}

namespace {

// Class c: amplitude kAmplitude[c], base frequency kCycles[c] cycles per
// segment with +/- kJitter cycles of per-sample spread, white noise kNoise.
// Every amplitude is at least 3x the noise std.
constexpr double kCycles[5] = {2.0, 4.0, 6.0, 8.0, 10.0};
constexpr double kAmplitude[5] = {1.0, 1.25, 1.5, 1.75, 2.0};
constexpr double kJitter = 1.0;
constexpr double kNoise = 1.0 / 3.0;

}  // namespace

Dataset synth_generate(std::uint64_t seed, std::size_t n_per_class, std::size_t num_classes) {
    if (n_per_class < 1) throw InvalidArgument("synth_generate: n_per_class must be >= 1");
    if (num_classes != 2 && num_classes != 5) throw InvalidArgument("synth_generate: num_classes must be 2 or 5");

    // The two-class surrogate uses the Z and S profiles.
    const std::vector<std::size_t> profile = num_classes == 5 ? std::vector<std::size_t>{0, 1, 2, 3, 4}
                                                              : std::vector<std::size_t>{0, 4};
    Dataset d;
    d.class_names = num_classes == 5 ? five_class_names() : binary_class_names();
    d.features.reserve(n_per_class * num_classes * kSegmentLength);
    Rng rng(seed);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const std::size_t p = profile[c];
        for (std::size_t k = 0; k < n_per_class; ++k) {
            const double phase = two_pi * rng.uniform();
            const double cycles = kCycles[p] + kJitter * (2.0 * rng.uniform() - 1.0);
            for (std::size_t t = 0; t < kSegmentLength; ++t) {
                const double angle = two_pi * cycles * static_cast<double>(t) / static_cast<double>(kSegmentLength);
                d.features.push_back(kAmplitude[p] * std::sin(angle + phase) + kNoise * rng.normal());
            }
            d.labels.push_back(static_cast<int>(c));
            d.ids.push_back("synth" + std::to_string(seed) + "." + std::to_string(c) + "." + std::to_string(k));
        }
    }
    return d;
}

}  // namespace eegnet
