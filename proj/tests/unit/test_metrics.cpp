#include <gtest/gtest.h>

#include <algorithm>
#include <iterator>
#include <random>
#include <set>
#include <utility>

#include "promptseg/error.hpp"
#include "promptseg/metrics.hpp"

namespace promptseg {
namespace {

using PixelSet = std::set<std::pair<int, int>>;

PixelSet pixel_set(const BinaryMask& m) {
    PixelSet s;
    for (int y = 0; y < m.height(); ++y)
        for (int x = 0; x < m.width(); ++x)
            if (m.at(x, y)) s.insert({x, y});
    return s;
}

// Brute force over explicit pixel sets, independent of confusion_counts.
struct OracleScores {
    double dice, iou, accuracy;
};

OracleScores oracle(const BinaryMask& pred, const BinaryMask& gt) {
    const PixelSet p = pixel_set(pred), g = pixel_set(gt);
    PixelSet inter, uni;
    std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::inserter(inter, inter.end()));
    std::set_union(p.begin(), p.end(), g.begin(), g.end(), std::inserter(uni, uni.end()));
    const double total = static_cast<double>(pred.width()) * pred.height();
    const double correct = total - static_cast<double>(uni.size() - inter.size());
    if (uni.empty()) return {1.0, 1.0, correct / total};
    return {2.0 * static_cast<double>(inter.size()) / static_cast<double>(p.size() + g.size()),
            static_cast<double>(inter.size()) / static_cast<double>(uni.size()), correct / total};
}

BinaryMask random_mask(std::mt19937& gen, int w, int h, double density) {
    std::bernoulli_distribution on(density);
    BinaryMask m(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) m.set(x, y, on(gen));
    return m;
}

BinaryMask from_rows(std::initializer_list<const char*> rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(std::string(*rows.begin()).size());
    BinaryMask m(w, h);
    int y = 0;
    for (const char* r : rows) {
        for (int x = 0; x < w; ++x) m.set(x, y, r[x] == '#');
        ++y;
    }
    return m;
}

TEST(ConfusionCounts, IdentityAndComplement) {
    BinaryMask m(4, 4);
    for (int i = 0; i < 5; ++i) m.set(i % 4, i / 4, true);
    EXPECT_EQ(confusion_counts(m, m), (ConfusionCounts{5, 0, 0, 11}));
    const ConfusionCounts c = confusion_counts(m.complement(), m);
    EXPECT_EQ(c.tp, 0u);
    EXPECT_EQ(c.tn, 0u);
    EXPECT_EQ(pixel_accuracy(c), 0.0);
}

TEST(ConfusionCounts, FourByFourOverlapTwo) {
    const BinaryMask gt = from_rows({"##..", "##..", "....", "...."});
    const BinaryMask pred = from_rows({".##.", ".##.", "....", "...."});
    const ConfusionCounts c = confusion_counts(pred, gt);
    EXPECT_EQ(c, (ConfusionCounts{2, 2, 2, 10}));
    EXPECT_EQ(pixel_accuracy(c), 0.75);
    EXPECT_EQ(iou(c), 2.0 / 6.0);
    EXPECT_EQ(dice(c), 0.5);

    const MetricRecord r = evaluate_pair(pred, gt, "x", LesionClass::DF);
    EXPECT_EQ(r.dice, 0.5);
    EXPECT_NEAR(r.iou, 0.3333, 1e-4);
    EXPECT_EQ(r.pixel_accuracy, 0.75);
    EXPECT_FALSE(r.degenerate);
}

TEST(ConfusionCounts, DimensionMismatchThrows) {
    EXPECT_THROW(confusion_counts(BinaryMask(3, 4), BinaryMask(4, 3)), DimensionMismatch);
    EXPECT_THROW(evaluate_pair(BinaryMask(3, 3), BinaryMask(3, 4), "x", LesionClass::NV),
                 DimensionMismatch);
}

TEST(Metrics, EmptyMaskConventions) {
    const MetricRecord both = evaluate_pair(BinaryMask(5, 5), BinaryMask(5, 5), "e", LesionClass::NV);
    EXPECT_EQ(both.dice, 1.0);
    EXPECT_EQ(both.iou, 1.0);
    EXPECT_EQ(both.pixel_accuracy, 1.0);
    EXPECT_TRUE(both.degenerate);

    BinaryMask gt(5, 5);
    gt.set(2, 2, true);
    const MetricRecord miss = evaluate_pair(BinaryMask(5, 5), gt, "m", LesionClass::NV);
    EXPECT_EQ(miss.dice, 0.0);
    EXPECT_EQ(miss.iou, 0.0);
    EXPECT_TRUE(miss.degenerate);
    EXPECT_THROW(pixel_accuracy(ConfusionCounts{}), InvalidArgument);
}

TEST(Metrics, DisjointNonEmptyIsZero) {
    const BinaryMask a = from_rows({"#..", "...", "..."});
    const BinaryMask b = from_rows({"...", "...", "..#"});
    EXPECT_EQ(dice(confusion_counts(a, b)), 0.0);
}

TEST(Metrics, MatchesPixelSetOracleExactly) {
    std::mt19937 gen(2024);
    for (int t = 0; t < 1000; ++t) {
        const int w = 1 + gen() % 32, h = 1 + gen() % 32;
        const double density = (gen() % 100) / 100.0;
        const BinaryMask p = random_mask(gen, w, h, density);
        const BinaryMask g = random_mask(gen, w, h, (gen() % 100) / 100.0);
        const MetricRecord r = evaluate_pair(p, g, "r", LesionClass::BKL);
        const OracleScores o = oracle(p, g);
        ASSERT_EQ(r.dice, o.dice);
        ASSERT_EQ(r.iou, o.iou);
        ASSERT_EQ(r.pixel_accuracy, o.accuracy);
    }
}

TEST(Metrics, DiceIouIdentityOverCountTuples) {
    for (std::uint64_t tp = 0; tp < 30; ++tp)
        for (std::uint64_t fp = 0; fp < 30; ++fp)
            for (std::uint64_t fn = 0; fn < 30; ++fn) {
                const ConfusionCounts c{tp, fp, fn, 7};
                const double d = dice(c), j = iou(c);
                ASSERT_NEAR(d, 2.0 * j / (1.0 + j), 1e-12);
                ASSERT_LE(0.0, j);
                ASSERT_LE(j, d);
                ASSERT_LE(d, 1.0);
            }
}

TEST(Metrics, SwappingPredAndGtIsSymmetric) {
    std::mt19937 gen(7);
    for (int t = 0; t < 300; ++t) {
        const BinaryMask p = random_mask(gen, 12, 9, 0.3), g = random_mask(gen, 12, 9, 0.5);
        const MetricRecord a = evaluate_pair(p, g, "s", LesionClass::NV);
        const MetricRecord b = evaluate_pair(g, p, "s", LesionClass::NV);
        EXPECT_EQ(a.dice, b.dice);
        EXPECT_EQ(a.iou, b.iou);
        EXPECT_EQ(a.pixel_accuracy, b.pixel_accuracy);
    }
}

TEST(Metrics, TranslationIntoPaddingKeepsOverlapScores) {
    std::mt19937 gen(13);
    for (int t = 0; t < 200; ++t) {
        const int w = 4 + gen() % 12, h = 4 + gen() % 12;
        const BinaryMask p = random_mask(gen, w, h, 0.4), g = random_mask(gen, w, h, 0.4);
        const int dx = gen() % 5, dy = gen() % 5;
        BinaryMask pp(w + 6, h + 6), gg(w + 6, h + 6);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                pp.set(x + dx, y + dy, p.at(x, y));
                gg.set(x + dx, y + dy, g.at(x, y));
            }
        const ConfusionCounts a = confusion_counts(p, g), b = confusion_counts(pp, gg);
        EXPECT_EQ(a.tp, b.tp);
        EXPECT_EQ(a.fp, b.fp);
        EXPECT_EQ(a.fn, b.fn);
        EXPECT_EQ(dice(a), dice(b));
        EXPECT_EQ(iou(a), iou(b));
    }
}

}  // namespace
}  // namespace promptseg
