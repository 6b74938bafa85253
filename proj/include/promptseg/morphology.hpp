#pragma once

#include "promptseg/mask.hpp"

namespace promptseg {

// 4-connected (cross) structuring element applied `iterations` times.
// Pixels outside the image neither add foreground nor erode it.
BinaryMask dilate4(const BinaryMask& mask, int iterations);
BinaryMask erode4(const BinaryMask& mask, int iterations);

}  // namespace promptseg
