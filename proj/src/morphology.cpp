#include "promptseg/morphology.hpp"

#include "promptseg/error.hpp"

namespace promptseg {

namespace {

constexpr int kDx[4] = {1, -1, 0, 0};
constexpr int kDy[4] = {0, 0, 1, -1};

BinaryMask step(const BinaryMask& in, bool dilate) {
    BinaryMask out(in.width(), in.height());
    for (int y = 0; y < in.height(); ++y) {
        for (int x = 0; x < in.width(); ++x) {
            bool v = in.at(x, y) != 0;
            for (int k = 0; k < 4; ++k) {
                const int nx = x + kDx[k];
                const int ny = y + kDy[k];
                if (!in.contains(nx, ny)) continue;
                const bool nv = in.at(nx, ny) != 0;
                v = dilate ? (v || nv) : (v && nv);
            }
            out.set(x, y, v);
        }
    }
    return out;
}

BinaryMask repeat(const BinaryMask& mask, int iterations, bool dilate) {
    if (iterations < 0) throw InvalidArgument("morphology iterations must be >= 0");
    BinaryMask cur = mask;
    for (int i = 0; i < iterations; ++i) {
        BinaryMask next = step(cur, dilate);
        if (next == cur) break;
        cur = std::move(next);
    }
    return cur;
}

}  // namespace

BinaryMask dilate4(const BinaryMask& mask, int iterations) { return repeat(mask, iterations, true); }
BinaryMask erode4(const BinaryMask& mask, int iterations) { return repeat(mask, iterations, false); }

}  // namespace promptseg
