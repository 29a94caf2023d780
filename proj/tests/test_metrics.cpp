#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "eegnet/error.hpp"
#include "eegnet/metrics.hpp"
#include "eegnet/rng.hpp"

using namespace eegnet;

namespace {

ConfusionMatrix from_counts(std::size_t c, std::vector<std::uint64_t> counts) {
    std::vector<int> preds, labels;
    for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = 0; j < c; ++j) {
            for (std::uint64_t k = 0; k < counts[i * c + j]; ++k) {
                labels.push_back(static_cast<int>(i));
                preds.push_back(static_cast<int>(j));
            }
        }
    }
    return confusion_matrix(preds, labels, c);
}

struct Recount {
    std::vector<double> spec, sens, f1;
};

// Per-sample brute force straight from the definitions, sharing nothing with
// the matrix code.
Recount recount(const std::vector<int>& preds, const std::vector<int>& labels, std::size_t c) {
    Recount r;
    for (std::size_t k = 0; k < c; ++k) {
        const int cls = static_cast<int>(k);
        std::uint64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < preds.size(); ++i) {
            if (preds[i] == cls && labels[i] == cls) ++tp;
            if (preds[i] == cls && labels[i] != cls) ++fp;
            if (preds[i] != cls && labels[i] == cls) ++fn;
        }
        const double s = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double e = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        r.spec.push_back(s);
        r.sens.push_back(e);
        r.f1.push_back(s + e == 0.0 ? 0.0 : 2.0 * s * e / (s + e));
    }
    return r;
}

}  // namespace

TEST(ConfusionMatrix, HandCounts) {
    const std::vector<int> five = {0, 1, 2, 3, 4};
    const ConfusionMatrix id = confusion_matrix(five, five, 5);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(id.at(i, j), i == j ? 1u : 0u);
    }

    const ConfusionMatrix cm = confusion_matrix(std::vector<int>{0, 0}, std::vector<int>{0, 1}, 2);
    EXPECT_EQ(cm.counts, (std::vector<std::uint64_t>{1, 0, 1, 0}));

    const ConfusionMatrix empty = confusion_matrix(std::vector<int>{}, std::vector<int>{}, 3);
    EXPECT_EQ(empty.counts, std::vector<std::uint64_t>(9, 0));
    EXPECT_EQ(empty.total(), 0u);
    EXPECT_EQ(empty.class_names, (std::vector<std::string>{"0", "1", "2"}));
}

TEST(ConfusionMatrix, RejectsBadInput) {
    EXPECT_THROW(confusion_matrix(std::vector<int>{0}, std::vector<int>{0, 1}, 2), InvalidArgument);
    EXPECT_THROW(confusion_matrix(std::vector<int>{2}, std::vector<int>{0}, 2), InvalidArgument);
    EXPECT_THROW(confusion_matrix(std::vector<int>{0}, std::vector<int>{-1}, 2), InvalidArgument);
    EXPECT_THROW(confusion_matrix(std::vector<int>{0}, std::vector<int>{0}, 1), InvalidArgument);
}

TEST(Metrics, IdentityIsPerfect) {
    const ConfusionMatrix cm = from_counts(3, {4, 0, 0, 0, 2, 0, 0, 0, 7});
    for (double v : specificity_per_class(cm)) EXPECT_EQ(v, 1.0);
    for (double v : sensitivity_per_class(cm)) EXPECT_EQ(v, 1.0);
    const ClassificationReport r = classification_report(cm);
    EXPECT_EQ(r.average.specificity, 1.0);
    EXPECT_EQ(r.average.sensitivity, 1.0);
    EXPECT_EQ(r.average.f1, 1.0);
    EXPECT_EQ(r.accuracy, 1.0);
}

TEST(Metrics, NineOneMatrix) {
    const ConfusionMatrix cm = from_counts(2, {9, 1, 1, 9});
    EXPECT_EQ(specificity_per_class(cm), (std::vector<double>{0.9, 0.9}));
    EXPECT_EQ(sensitivity_per_class(cm), (std::vector<double>{0.9, 0.9}));
    const ClassificationReport r = classification_report(cm);
    EXPECT_DOUBLE_EQ(r.average.specificity, 0.9);
    EXPECT_DOUBLE_EQ(r.average.sensitivity, 0.9);
    EXPECT_DOUBLE_EQ(r.average.f1, 0.9);
    EXPECT_EQ(r.average.support, 20u);
    EXPECT_EQ(r.rows[0].support, 10u);
}

TEST(Metrics, ZeroDenominators) {
    // Class 1 never predicted; labels half 0, half 1.
    const ConfusionMatrix cm = confusion_matrix(std::vector<int>{0, 0, 0, 0}, std::vector<int>{0, 0, 1, 1}, 2);
    EXPECT_EQ(specificity_per_class(cm)[1], 0.0);
    EXPECT_EQ(sensitivity_per_class(cm), (std::vector<double>{1.0, 0.0}));
    EXPECT_EQ(f1_per_class(cm)[1], 0.0);
}

TEST(Metrics, F1HarmonicMean) {
    EXPECT_DOUBLE_EQ(f1_score(0.9, 0.9), 0.9);
    EXPECT_DOUBLE_EQ(f1_score(1.0, 0.5), 2.0 / 3.0);
    EXPECT_EQ(f1_score(0.0, 0.0), 0.0);
}

TEST(Metrics, AgreeWithBruteForceRecount) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t c = 2 + rng.below(4), n = rng.below(51);
        std::vector<int> preds(n), labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = static_cast<int>(rng.below(c));
            labels[i] = static_cast<int>(rng.below(c));
        }
        const ConfusionMatrix cm = confusion_matrix(preds, labels, c);
        const Recount want = recount(preds, labels, c);
        ASSERT_EQ(specificity_per_class(cm), want.spec);
        ASSERT_EQ(sensitivity_per_class(cm), want.sens);
        ASSERT_EQ(f1_per_class(cm), want.f1);

        const ClassificationReport r = classification_report(cm);
        std::uint64_t support = 0;
        for (std::size_t k = 0; k < c; ++k) {
            EXPECT_GE(r.rows[k].f1, 0.0);
            EXPECT_LE(r.rows[k].f1, 1.0);
            if (want.spec[k] > 0.0 && want.sens[k] > 0.0) {
                EXPECT_LE(r.rows[k].f1, std::max(want.spec[k], want.sens[k]) + 1e-15);
                EXPECT_GE(r.rows[k].f1, std::min(want.spec[k], want.sens[k]) - 1e-15);
            }
            support += r.rows[k].support;
        }
        EXPECT_EQ(support, n);
        EXPECT_EQ(r.average.support, n);

        // Micro sensitivity is accuracy.
        std::uint64_t tp = 0;
        for (std::size_t k = 0; k < c; ++k) tp += cm.true_positives(k);
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) hits += preds[i] == labels[i];
        if (n > 0) {
            EXPECT_EQ(static_cast<double>(tp) / static_cast<double>(n), static_cast<double>(hits) / static_cast<double>(n));
            EXPECT_EQ(r.accuracy, static_cast<double>(hits) / static_cast<double>(n));
        }
    }
}

TEST(Metrics, ClassPermutationPermutesRows) {
    Rng rng(22);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t c = 2 + rng.below(4), n = 1 + rng.below(50);
        std::vector<int> preds(n), labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            preds[i] = static_cast<int>(rng.below(c));
            labels[i] = static_cast<int>(rng.below(c));
        }
        std::vector<int> perm(c);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(std::span<int>(perm));
        std::vector<int> pp(n), pl(n);
        for (std::size_t i = 0; i < n; ++i) {
            pp[i] = perm[static_cast<std::size_t>(preds[i])];
            pl[i] = perm[static_cast<std::size_t>(labels[i])];
        }
        const ClassificationReport a = classification_report(confusion_matrix(preds, labels, c));
        const ClassificationReport b = classification_report(confusion_matrix(pp, pl, c));
        for (std::size_t k = 0; k < c; ++k) {
            const auto& ra = a.rows[k];
            const auto& rb = b.rows[static_cast<std::size_t>(perm[k])];
            EXPECT_EQ(ra.specificity, rb.specificity);
            EXPECT_EQ(ra.sensitivity, rb.sensitivity);
            EXPECT_EQ(ra.f1, rb.f1);
            EXPECT_EQ(ra.support, rb.support);
        }
        EXPECT_EQ(a.average, b.average);
    }
}

TEST(Report, TextAndJsonLayout) {
    ConfusionMatrix cm = from_counts(2, {9, 1, 1, 9});
    cm.class_names = {"healthy", "seizure"};
    const ClassificationReport r = classification_report(cm);
    EXPECT_EQ(r.rows[0].name, "healthy");

    const std::string text = render_text(r);
    EXPECT_NE(text.find("specificity (precision)"), std::string::npos);
    EXPECT_NE(text.find("sensitivity (recall)"), std::string::npos);
    EXPECT_NE(text.find("healthy"), std::string::npos);
    EXPECT_NE(text.find("0.9000"), std::string::npos);
    EXPECT_NE(text.find("average"), std::string::npos);

    const nlohmann::json j = render_json(r);
    ASSERT_TRUE(j.is_array());
    ASSERT_EQ(j.size(), 3u);
    for (const auto& row : j) {
        for (const char* key : {"class", "specificity", "sensitivity", "f1", "support"}) EXPECT_TRUE(row.contains(key)) << key;
        EXPECT_EQ(row.size(), 5u);
    }
    EXPECT_EQ(j[0]["class"], "healthy");
    EXPECT_EQ(j[2]["class"], "average");
    EXPECT_EQ(j[2]["support"], 20);
    EXPECT_EQ(j[1]["specificity"].get<double>(), 0.9);
}
