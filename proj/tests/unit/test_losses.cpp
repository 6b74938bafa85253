#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "promptseg/error.hpp"
#include "promptseg/losses.hpp"

namespace promptseg {
namespace {

BinaryMask half_ones(int w, int h) {
    BinaryMask g(w, h);
    for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w; ++x) g.set(x, y, true);
    return g;
}

// Independent evaluation used by the finite-difference oracle: plain loops,
// no shared code with the library.
double reference_combined(const std::vector<double>& p, const BinaryMask& g) {
    const double eps = 1e-7, s = 1.0;
    double spg = 0, sp = 0, sg = 0, ce = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double c = std::clamp(p[i], eps, 1 - eps);
        const double gi = g.data()[i];
        spg += c * gi;
        sp += c;
        sg += gi;
        ce -= gi * std::log(c) + (1 - gi) * std::log(1 - c);
    }
    return 1 - (2 * spg + s) / (sp + sg + s) + ce / static_cast<double>(p.size());
}

TEST(SoftDice, ClosedFormWithSmoothing) {
    const ProbMask p(2, 2, 0.5);
    EXPECT_NEAR(soft_dice_loss(p, BinaryMask(2, 2)), 2.0 / 3.0, 1e-15);
}

TEST(SoftDice, HalfOnesWithoutSmoothing) {
    const ProbMask p(8, 8, 0.5);
    LossOptions no_smooth;
    no_smooth.smoothing = 0.0;
    EXPECT_NEAR(soft_dice_loss(p, half_ones(8, 8), no_smooth), 0.5, 1e-12);
    EXPECT_NEAR(combined_loss_with_grad(p, half_ones(8, 8), no_smooth).combined,
                0.5 + std::numbers::ln2, 1e-9);
}

TEST(SoftDice, PerfectMatchIsNearZero) {
    const BinaryMask g = half_ones(6, 6);
    EXPECT_LT(soft_dice_loss(ProbMask::from_binary(g), g), 1e-5);
}

TEST(CrossEntropy, UniformHalfIsLn2ForAnyTarget) {
    std::mt19937 gen(1);
    for (int t = 0; t < 20; ++t) {
        BinaryMask g(7, 5);
        for (int i = 0; i < 35; ++i) g.set(i % 7, i / 7, gen() % 2);
        EXPECT_NEAR(cross_entropy_loss(ProbMask(7, 5, 0.5), g), std::numbers::ln2, 1e-9);
    }
}

TEST(CrossEntropy, PerfectMatchIsTiny) {
    const BinaryMask g = half_ones(4, 4);
    EXPECT_LT(cross_entropy_loss(ProbMask::from_binary(g), g), 1e-6);
}

TEST(CrossEntropy, MovingTowardTargetNeverIncreases) {
    std::mt19937 gen(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v(16);
        for (auto& x : v) x = u(gen);
        BinaryMask g(4, 4);
        for (int i = 0; i < 16; ++i) g.set(i % 4, i / 4, gen() % 2);
        const std::size_t k = gen() % 16;
        std::vector<double> w = v;
        const double target = g.data()[k];
        w[k] = v[k] + (target - v[k]) * u(gen);
        EXPECT_LE(cross_entropy_loss(ProbMask(4, 4, w), g), cross_entropy_loss(ProbMask(4, 4, v), g));
    }
}

TEST(Combined, EqualsSumBitForBit) {
    std::mt19937 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const int w = 1 + gen() % 10, h = 1 + gen() % 10;
        std::vector<double> v(static_cast<std::size_t>(w * h));
        for (auto& x : v) x = u(gen);
        BinaryMask g(w, h);
        for (int i = 0; i < w * h; ++i) g.set(i % w, i / w, gen() % 2);
        const ProbMask p(w, h, v);
        const LossReport r = combined_loss_with_grad(p, g);
        EXPECT_EQ(r.dice_loss, soft_dice_loss(p, g));
        EXPECT_EQ(r.ce_loss, cross_entropy_loss(p, g));
        EXPECT_EQ(r.combined, r.dice_loss + r.ce_loss);
        EXPECT_EQ(r.gradient.size(), v.size());
        EXPECT_GE(r.ce_loss, 0.0);
    }
}

TEST(Combined, NonNegativeOnBinaryValuedPredictions) {
    std::mt19937 gen(10);
    for (int t = 0; t < 200; ++t) {
        BinaryMask p(5, 5), g(5, 5);
        for (int i = 0; i < 25; ++i) {
            p.set(i % 5, i / 5, gen() % 2);
            g.set(i % 5, i / 5, gen() % 2);
        }
        EXPECT_GT(combined_loss_with_grad(ProbMask::from_binary(p), g).combined, -1e-9);
    }
}

TEST(Combined, GradientConstantWithinSymmetricGroups) {
    const BinaryMask g = half_ones(6, 6);
    const LossReport r = combined_loss_with_grad(ProbMask(6, 6, 0.5), g);
    for (std::size_t i = 0; i < r.gradient.size(); ++i) {
        const std::size_t ref = g.data()[i] ? 0 : r.gradient.size() - 1;
        EXPECT_EQ(r.gradient[i], r.gradient[ref]);
    }
    EXPECT_LT(r.gradient.front(), 0.0);
    EXPECT_GT(r.gradient.back(), 0.0);
}

TEST(Combined, MatchesCentralDifferencesOnSixBySix) {
    std::mt19937 gen(66);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    std::vector<double> v(36);
    for (auto& x : v) x = u(gen);
    BinaryMask g(6, 6);
    for (int i = 0; i < 36; ++i) g.set(i % 6, i / 6, gen() % 2);
    const LossReport r = combined_loss_with_grad(ProbMask(6, 6, v), g);
    const double h = 1e-6;
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto hi = v, lo = v;
        hi[i] += h;
        lo[i] -= h;
        const double fd = (reference_combined(hi, g) - reference_combined(lo, g)) / (2 * h);
        worst = std::max(worst, std::abs(fd - r.gradient[i]) /
                                    std::max({std::abs(fd), std::abs(r.gradient[i]), 1e-12}));
    }
    EXPECT_LT(worst, 1e-4);
    EXPECT_NEAR(r.combined, reference_combined(v, g), 1e-12);
}

TEST(Combined, ZeroGradientBeyondClamp) {
    const std::vector<double> v{0.0, 1.0, 0.5, 1e-7};
    BinaryMask g(2, 2);
    g.set(0, 0, true);
    const LossReport r = combined_loss_with_grad(ProbMask(2, 2, v), g);
    EXPECT_EQ(r.gradient[0], 0.0);
    EXPECT_EQ(r.gradient[1], 0.0);
    EXPECT_NE(r.gradient[2], 0.0);
    EXPECT_NE(r.gradient[3], 0.0);  // on the boundary: clamped value is used
}

TEST(GradientCheck, HundredInstancesPass) {
    const GradientCheckResult res = run_gradient_check();
    EXPECT_EQ(res.instances, 100);
    EXPECT_TRUE(res.passed);
    EXPECT_LT(res.max_relative_error, 1e-4);
}

TEST(GradientDescent, FromHalfReducesLossEveryStep) {
    // 200 plain steps of size 0.1 from p = 0.5 on a 16x16 target, projected
    // back onto [0, 1].
    BinaryMask g(16, 16);
    for (int y = 4; y < 12; ++y)
        for (int x = 4; x < 12; ++x) g.set(x, y, true);
    std::vector<double> v(256, 0.5);
    double prev = combined_loss_with_grad(ProbMask(16, 16, v), g).combined;
    bool strictly_decreasing = true;
    LossReport last;
    for (int step = 0; step < 200; ++step) {
        const LossReport r = combined_loss_with_grad(ProbMask(16, 16, v), g);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i] - 0.1 * r.gradient[i], 0.0, 1.0);
        last = combined_loss_with_grad(ProbMask(16, 16, v), g);
        strictly_decreasing = strictly_decreasing && last.combined < prev;
        prev = last.combined;
    }
    EXPECT_TRUE(strictly_decreasing);
    EXPECT_LT(last.dice_loss, 0.05);
}

TEST(ProbMask, RejectsOutOfRange) {
    EXPECT_THROW(ProbMask(2, 1, std::vector<double>{0.5, 1.5}), InvalidArgument);
    EXPECT_THROW(ProbMask(2, 1, std::vector<double>{0.5, NAN}), InvalidArgument);
    EXPECT_THROW(ProbMask(2, 2, std::vector<double>{0.5}), InvalidArgument);
    EXPECT_THROW(soft_dice_loss(ProbMask(2, 2, 0.5), BinaryMask(2, 3)), DimensionMismatch);
}

}  // namespace
}  // namespace promptseg
