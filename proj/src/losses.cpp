#include "promptseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "promptseg/error.hpp"
#include "promptseg/rng.hpp"

namespace promptseg {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) throw InvalidArgument("probability map dimensions must be >= 1");
}

void check_same_shape(const ProbMask& p, const BinaryMask& g) {
    if (p.width() != g.width() || p.height() != g.height()) {
        throw DimensionMismatch("probability map is " + std::to_string(p.width()) + "x" +
                                std::to_string(p.height()) + ", target is " +
                                std::to_string(g.width()) + "x" + std::to_string(g.height()));
    }
}

double clamp_prob(double v, double eps) { return std::clamp(v, eps, 1.0 - eps); }

// Sums are always accumulated sequentially in pixel order so every entry
// point sees bit-identical values.
struct DiceSums {
    double intersection = 0.0;  // sum p*g
    double pred = 0.0;          // sum p
    double target = 0.0;        // sum g
};

DiceSums dice_sums(const ProbMask& p, const BinaryMask& g, double eps) {
    DiceSums s;
    const auto gd = g.data();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double c = clamp_prob(p[i], eps);
        s.pred += c;
        if (gd[i]) {
            s.intersection += c;
            s.target += 1.0;
        }
    }
    return s;
}

double dice_from_sums(const DiceSums& s, double smoothing) {
    return 1.0 - (2.0 * s.intersection + smoothing) / (s.pred + s.target + smoothing);
}

double ce_value(const ProbMask& p, const BinaryMask& g, double eps) {
    const auto gd = g.data();
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double c = clamp_prob(p[i], eps);
        acc += gd[i] ? std::log(c) : std::log1p(-c);
    }
    return -acc / static_cast<double>(p.size());
}

}  // namespace

ProbMask::ProbMask(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidArgument("probability outside [0, 1]");
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

ProbMask::ProbMask(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("probability map length does not match its dimensions");
    }
    for (double v : data_) {
        if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("probability outside [0, 1]");
    }
}

ProbMask ProbMask::from_binary(const BinaryMask& m) {
    std::vector<double> d(m.data().begin(), m.data().end());
    return ProbMask(m.width(), m.height(), std::move(d));
}

double ProbMask::clamped(std::size_t i) const noexcept { return clamp_prob(data_[i], kProbClamp); }

double soft_dice_loss(const ProbMask& p, const BinaryMask& g, const LossOptions& opt) {
    check_same_shape(p, g);
    return dice_from_sums(dice_sums(p, g, opt.eps), opt.smoothing);
}

double cross_entropy_loss(const ProbMask& p, const BinaryMask& g, const LossOptions& opt) {
    check_same_shape(p, g);
    return ce_value(p, g, opt.eps);
}

LossReport combined_loss_with_grad(const ProbMask& p, const BinaryMask& g, const LossOptions& opt) {
    check_same_shape(p, g);
    const DiceSums sums = dice_sums(p, g, opt.eps);

    LossReport r;
    r.dice_loss = dice_from_sums(sums, opt.smoothing);
    r.ce_loss = ce_value(p, g, opt.eps);
    r.combined = r.dice_loss + r.ce_loss;

    const double denom = sums.pred + sums.target + opt.smoothing;
    const double numer = 2.0 * sums.intersection + opt.smoothing;
    const double inv_n = 1.0 / static_cast<double>(p.size());
    const auto gd = g.data();
    r.gradient.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double raw = p[i];
        if (raw < opt.eps || raw > 1.0 - opt.eps) {
            r.gradient[i] = 0.0;
            continue;
        }
        const double c = clamp_prob(raw, opt.eps);
        const double gi = gd[i] ? 1.0 : 0.0;
        // d/dc of 1 - numer/denom, with numer' = 2g and denom' = 1.
        const double d_dice = -(2.0 * gi * denom - numer) / (denom * denom);
        const double d_ce = (gd[i] ? -1.0 / c : 1.0 / (1.0 - c)) * inv_n;
        r.gradient[i] = d_dice + d_ce;
    }
    return r;
}

GradientCheckResult run_gradient_check(const GradientCheckOptions& opt) {
    GradientCheckResult res;
    SeededStream rng(opt.seed);
    for (int inst = 0; inst < opt.instances; ++inst) {
        const int w = static_cast<int>(rng.uniform_int(1, opt.max_side));
        const int h = static_cast<int>(rng.uniform_int(1, opt.max_side));
        const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
        std::vector<std::uint8_t> gv(n);
        std::vector<double> pv(n);
        for (std::size_t i = 0; i < n; ++i) {
            gv[i] = static_cast<std::uint8_t>(rng.uniform_below(2));
            pv[i] = rng.uniform_real(0.05, 0.95);
        }
        const BinaryMask g(w, h, gv);
        const LossReport analytic = combined_loss_with_grad(ProbMask(w, h, pv), g);

        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> up = pv, down = pv;
            up[i] += opt.step;
            down[i] -= opt.step;
            const ProbMask pu(w, h, std::move(up));
            const ProbMask pd(w, h, std::move(down));
            const double fu = soft_dice_loss(pu, g) + cross_entropy_loss(pu, g);
            const double fd = soft_dice_loss(pd, g) + cross_entropy_loss(pd, g);
            const double numeric = (fu - fd) / (2.0 * opt.step);
            const double a = analytic.gradient[i];
            const double scale = std::max({std::abs(a), std::abs(numeric), 1e-12});
            res.max_relative_error = std::max(res.max_relative_error, std::abs(a - numeric) / scale);
        }
        ++res.instances;
    }
    res.passed = res.max_relative_error < opt.tolerance;
    return res;
}

}  // namespace promptseg
