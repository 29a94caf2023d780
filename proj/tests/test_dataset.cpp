#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "eegnet/dataset.hpp"
#include "eegnet/error.hpp"

using namespace eegnet;

namespace {

const std::filesystem::path kFixtures = EEGNET_FIXTURES;

// Reads the fixture with plain string splitting: numeric columns and y.
struct RawRow {
    std::vector<double> values;
    int y = 0;
};

std::vector<RawRow> read_raw(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    std::vector<RawRow> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        RawRow r;
        for (std::size_t i = 1; i + 1 < fields.size(); ++i) r.values.push_back(std::stod(fields[i]));
        r.y = std::stoi(fields.back());
        rows.push_back(r);
    }
    return rows;
}

// A UCI-shaped dataset: 2300 rows per class in the five-class labeling.
const Dataset& full_size() {
    static const Dataset d = synth_generate(99, 2300, 5);
    return d;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST(LoadCsv, ThreeRowFixture) {
    const Dataset d = load_csv(kFixtures / "three_rows.csv");
    const auto raw = read_raw(kFixtures / "three_rows.csv");
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d.length, 178u);
    EXPECT_EQ(d.class_names, five_class_names());
    // y = 5 -> Z (0), 1 -> S (4), 3 -> N (2)
    EXPECT_EQ(d.labels, (std::vector<int>{0, 4, 2}));
    EXPECT_EQ(d.ids, (std::vector<std::string>{"X21.V1.791", "X15.V1.924", "X8.V1.1"}));
    for (std::size_t i = 0; i < 3; ++i) {
        const auto row = d.row(i);
        EXPECT_TRUE(std::equal(row.begin(), row.end(), raw[i].values.begin(), raw[i].values.end()));
    }
}

TEST(LoadCsv, LabelMappingCoversAllFiveCodes) {
    const std::vector<std::string> names = five_class_names();
    EXPECT_EQ(names, (std::vector<std::string>{"Z", "O", "N", "D", "S"}));
    std::ostringstream csv;
    csv << "id";
    for (int i = 1; i <= 178; ++i) csv << ",X" << i;
    csv << ",y\n";
    for (int y = 1; y <= 5; ++y) {
        csv << "r" << y;
        for (int i = 0; i < 178; ++i) csv << "," << y;
        csv << "," << y << "\n";
    }
    std::istringstream in(csv.str());
    EXPECT_EQ(parse_csv(in).labels, (std::vector<int>{4, 3, 2, 1, 0}));
}

TEST(LoadCsv, ErrorsNameTheLine) {
    try {
        load_csv(kFixtures / "short_row.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    try {
        load_csv(kFixtures / "bad_label.csv");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    std::istringstream text("id,y\n");
    EXPECT_THROW(parse_csv(text), ParseError);
    EXPECT_THROW(load_csv(kFixtures / "missing.csv"), Error);

    std::ostringstream csv;
    csv << "id";
    for (int i = 1; i <= 178; ++i) csv << ",X" << i;
    csv << ",y\nr";
    for (int i = 0; i < 178; ++i) csv << "," << (i == 40 ? "abc" : "1");
    csv << ",2\n";
    std::istringstream bad(csv.str());
    EXPECT_THROW(parse_csv(bad), ParseError);
}

TEST(LoadCsv, RoundTripReproducesValues) {
    const Dataset d = load_csv(kFixtures / "three_rows.csv");
    std::ostringstream out;
    write_csv(d, out);
    std::istringstream in(out.str());
    const Dataset back = parse_csv(in);
    EXPECT_EQ(back.features, d.features);
    EXPECT_EQ(back.labels, d.labels);
    EXPECT_EQ(back.ids, d.ids);

    // Non-integer values survive exactly too.
    const Dataset s = synth_generate(5, 3, 5);
    std::ostringstream out2;
    write_csv(s, out2);
    std::istringstream in2(out2.str());
    EXPECT_EQ(parse_csv(in2).features, s.features);

    // Binary labels go back to y = 5 (healthy) and y = 1 (seizure).
    const Dataset b = map_labels_for_job(d, Job::Binary);
    std::ostringstream out3;
    write_csv(b, out3);
    std::istringstream in3(out3.str());
    EXPECT_EQ(map_labels_for_job(parse_csv(in3), Job::Binary).labels, b.labels);
}

TEST(LoadCsv, UnlabeledRows) {
    const UnlabeledRows rows = load_unlabeled_csv(kFixtures / "unlabeled.csv");
    EXPECT_EQ(rows.ids, (std::vector<std::string>{"p1", "p2", "p3"}));
    EXPECT_EQ(rows.features.size(), 3u * 178u);
    EXPECT_THROW(load_unlabeled_csv(kFixtures / "three_rows.csv"), ParseError);
}

TEST(MapLabels, BinaryKeepsHealthyAndIctal) {
    const Dataset& d = full_size();
    ASSERT_EQ(d.size(), 11500u);
    EXPECT_EQ(map_labels_for_job(d, Job::FiveClass).labels, d.labels);

    const Dataset b = map_labels_for_job(d, Job::Binary);
    EXPECT_EQ(b.size(), 6900u);
    EXPECT_EQ(b.class_names, binary_class_names());
    EXPECT_EQ(b.class_counts(), (std::vector<std::size_t>{4600, 2300}));
    for (int l : b.labels) EXPECT_TRUE(l == 0 || l == 1);

    const Dataset three = load_csv(kFixtures / "three_rows.csv");
    const Dataset tb = map_labels_for_job(three, Job::Binary);
    EXPECT_EQ(tb.labels, (std::vector<int>{0, 1}));  // N row dropped

    std::vector<std::size_t> nd;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d.labels[i] == 2 || d.labels[i] == 3) nd.push_back(i);
    }
    const Dataset empty = map_labels_for_job(d.subset(nd), Job::Binary);
    EXPECT_TRUE(empty.empty());
    EXPECT_EQ(empty.class_names, binary_class_names());

    EXPECT_THROW(map_labels_for_job(b, Job::Binary), InvalidArgument);
    EXPECT_THROW(job_from_string("triple"), InvalidArgument);
    EXPECT_EQ(job_from_string("five"), Job::FiveClass);
    EXPECT_EQ(job_from_string("multi"), Job::FiveClass);
    EXPECT_EQ(job_from_string("binary"), Job::Binary);
}

TEST(Split, PaperSizes) {
    const Dataset& d = full_size();
    const SplitIndices five = split_indices(d, SplitSpec{0.76, 0.12, 0.12, 42});
    EXPECT_EQ(five.train.size(), 8740u);
    EXPECT_EQ(five.val.size(), 1380u);
    EXPECT_EQ(five.test.size(), 1380u);

    const Split parts = split(d, SplitSpec{0.76, 0.12, 0.12, 42});
    EXPECT_EQ(parts.train.class_counts(), std::vector<std::size_t>(5, 1748));
    EXPECT_EQ(parts.val.class_counts(), std::vector<std::size_t>(5, 276));
    EXPECT_EQ(parts.test.class_counts(), std::vector<std::size_t>(5, 276));

    const SplitIndices two = split_indices(map_labels_for_job(d, Job::Binary), SplitSpec{0.76, 0.12, 0.12, 42});
    EXPECT_EQ(two.train.size(), 5244u);
    EXPECT_EQ(two.val.size(), 828u);
    EXPECT_EQ(two.test.size(), 828u);
}

TEST(Split, DisjointCoverAndDeterministic) {
    const Dataset d = synth_generate(3, 37, 5);
    const SplitSpec spec{0.76, 0.12, 0.12, 8};
    const SplitIndices s = split_indices(d, spec);
    std::vector<std::size_t> all = s.train;
    all.insert(all.end(), s.val.begin(), s.val.end());
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    std::vector<std::size_t> expect(d.size());
    for (std::size_t i = 0; i < expect.size(); ++i) expect[i] = i;
    EXPECT_EQ(all, expect);

    const SplitIndices again = split_indices(d, spec);
    EXPECT_EQ(s.train, again.train);
    EXPECT_EQ(s.val, again.val);
    EXPECT_EQ(s.test, again.test);
    EXPECT_NE(as_set(split_indices(d, SplitSpec{0.76, 0.12, 0.12, 9}).train), as_set(s.train));

    // floor(0.76 * 37) = 28, floor(0.12 * 37) = 4, remainder 5, per class.
    const Split parts = split(d, spec);
    EXPECT_EQ(parts.train.class_counts(), std::vector<std::size_t>(5, 28));
    EXPECT_EQ(parts.val.class_counts(), std::vector<std::size_t>(5, 4));
    EXPECT_EQ(parts.test.class_counts(), std::vector<std::size_t>(5, 5));
}

TEST(Split, Errors) {
    EXPECT_THROW(split(synth_generate(1, 5, 5), SplitSpec{0.76, 0.12, 0.12, 1}), StratificationError);
    EXPECT_THROW(split(synth_generate(1, 20, 5), SplitSpec{0.7, 0.2, 0.2, 1}), InvalidArgument);
    EXPECT_THROW(split(synth_generate(1, 20, 5), SplitSpec{1.0, 0.0, 0.0, 1}), InvalidArgument);
}

TEST(Standardize, TrainStatsOnly) {
    Dataset train = synth_generate(4, 30, 5);
    for (std::size_t i = 0; i < train.size(); ++i) train.features[i * 178 + 10] = 3.25;  // constant column
    Dataset val = synth_generate(5, 6, 5);
    for (double& v : val.features) v += 100.0;

    const Standardized z = standardize(train, {val});
    const std::size_t n = train.size();
    for (std::size_t f = 0; f < 178; ++f) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += z.train.features[i * 178 + f];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) var += std::pow(z.train.features[i * 178 + f] - mean, 2);
        const double sd = std::sqrt(var / static_cast<double>(n));
        EXPECT_NEAR(mean, 0.0, 1e-9);
        if (f == 10) {
            EXPECT_EQ(sd, 0.0);
            for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(z.train.features[i * 178 + f], 0.0);
        } else {
            EXPECT_NEAR(sd, 1.0, 1e-6);
        }
    }
    ASSERT_TRUE(z.train.stats.has_value());
    ASSERT_TRUE(z.others[0].stats.has_value());
    EXPECT_EQ(*z.train.stats, *z.others[0].stats);
    EXPECT_EQ(z.train.stats->std[10], 1e-8);

    // Val is moved by train's statistics, not its own.
    const FeatureStats& st = *z.train.stats;
    for (std::size_t i = 0; i < val.size(); ++i) {
        for (std::size_t f = 0; f < 178; f += 17) {
            EXPECT_DOUBLE_EQ(z.others[0].features[i * 178 + f], (val.features[i * 178 + f] - st.mean[f]) / st.std[f]);
        }
    }
    EXPECT_THROW(standardize(train.subset(std::vector<std::size_t>{}), {}), InvalidArgument);
}

TEST(Synth, BalancedDeterministicFinite) {
    const Dataset d = synth_generate(7, 100, 5);
    EXPECT_EQ(d.size(), 500u);
    EXPECT_EQ(d.class_counts(), std::vector<std::size_t>(5, 100));
    EXPECT_EQ(d.class_names, five_class_names());
    for (double v : d.features) ASSERT_TRUE(std::isfinite(v));
    const Dataset again = synth_generate(7, 100, 5);
    EXPECT_EQ(d.features, again.features);
    EXPECT_EQ(d.labels, again.labels);
    EXPECT_NE(synth_generate(8, 100, 5).features, d.features);

    const Dataset b = synth_generate(7, 10, 2);
    EXPECT_EQ(b.class_names, binary_class_names());
    EXPECT_EQ(b.class_counts(), (std::vector<std::size_t>{10, 10}));
    EXPECT_THROW(synth_generate(1, 0, 5), InvalidArgument);
    EXPECT_THROW(synth_generate(1, 5, 3), InvalidArgument);
}

TEST(Synth, ClassesOccupyDistinctFrequencyBands) {
    // Independent check by direct DFT: the strongest bin of each segment lies
    // in its class band (profiles at 2, 4, 6, 8, 10 cycles, +/- 1), and the
    // in-band power dominates the noise floor.
    const Dataset d = synth_generate(11, 100, 5);
    std::vector<std::size_t> in_band(5, 0);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto x = d.row(i);
        std::size_t best = 0;
        double best_power = -1.0;
        for (std::size_t k = 1; k < 30; ++k) {
            double re = 0.0, im = 0.0;
            for (std::size_t t = 0; t < x.size(); ++t) {
                const double a = 2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(x.size());
                re += x[t] * std::cos(a);
                im -= x[t] * std::sin(a);
            }
            const double power = re * re + im * im;
            if (power > best_power) {
                best_power = power;
                best = k;
            }
        }
        const std::size_t c = static_cast<std::size_t>(d.labels[i]);
        const double centre = 2.0 * static_cast<double>(c + 1);
        if (std::abs(static_cast<double>(best) - centre) <= 1.0) ++in_band[c];
    }
    for (std::size_t c = 0; c < 5; ++c) EXPECT_GE(in_band[c], 90u) << "class " << c;
}
