#pragma once
// Reference training objective: soft Dice loss plus mean binary cross-entropy,
// summed without weights, with the analytic gradient d(loss)/dp.

#include <cstdint>
#include <span>
#include <vector>

#include "promptseg/mask.hpp"

namespace promptseg {

inline constexpr double kProbClamp = 1e-7;
inline constexpr double kDiceSmoothing = 1.0;

// Row-major probabilities in [0, 1]. Losses read them through
// clamp(p, eps, 1 - eps).
class ProbMask {
public:
    ProbMask(int width, int height, double fill);
    // Throws InvalidArgument on size mismatch or values outside [0, 1] / non-finite.
    ProbMask(int width, int height, std::vector<double> data);

    static ProbMask from_binary(const BinaryMask& m);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    std::span<const double> data() const noexcept { return data_; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    // Value clamped into [eps, 1 - eps].
    double clamped(std::size_t i) const noexcept;

private:
    int width_;
    int height_;
    std::vector<double> data_;
};

struct LossOptions {
    double smoothing = kDiceSmoothing;
    double eps = kProbClamp;
};

// 1 - (2*sum(p*g) + s) / (sum(p) + sum(g) + s). Throws DimensionMismatch.
double soft_dice_loss(const ProbMask& p, const BinaryMask& g, const LossOptions& opt = {});

// -(1/N) * sum(g*ln p + (1-g)*ln(1-p)). Throws DimensionMismatch.
double cross_entropy_loss(const ProbMask& p, const BinaryMask& g, const LossOptions& opt = {});

struct LossReport {
    double dice_loss = 0.0;
    double ce_loss = 0.0;
    double combined = 0.0;
    std::vector<double> gradient;  // d(combined)/dp, row-major
};

// Gradient is zero where p lies strictly outside [eps, 1 - eps] (the clamp is
// flat there); at the boundary the clamped value is used.
LossReport combined_loss_with_grad(const ProbMask& p, const BinaryMask& g,
                                   const LossOptions& opt = {});

struct GradientCheckOptions {
    int instances = 100;
    int max_side = 12;
    double step = 1e-6;
    double tolerance = 1e-4;
    std::uint64_t seed = 0;
};

struct GradientCheckResult {
    int instances = 0;
    double max_relative_error = 0.0;
    bool passed = false;
};

// Central differences on random (p, g) pairs with p kept away from the clamp.
GradientCheckResult run_gradient_check(const GradientCheckOptions& opt = {});

}  // namespace promptseg
