#include "promptseg/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "promptseg/error.hpp"

namespace promptseg {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InvalidArgument("mask dimensions must be >= 1, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
}

}  // namespace

BinaryMask::BinaryMask(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                 fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidArgument("mask data length " + std::to_string(data_.size()) +
                              " does not match " + std::to_string(width) + "x" +
                              std::to_string(height));
    }
    if (std::any_of(data_.begin(), data_.end(), [](std::uint8_t v) { return v > 1; })) {
        throw InvalidArgument("mask values must be 0 or 1");
    }
}

std::size_t BinaryMask::foreground_count() const noexcept {
    return std::accumulate(data_.begin(), data_.end(), std::size_t{0});
}

BinaryMask BinaryMask::complement() const {
    std::vector<std::uint8_t> out(data_.size());
    std::transform(data_.begin(), data_.end(), out.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(1 - v); });
    return BinaryMask(width_, height_, std::move(out));
}

BinaryMask binarize_mask(const Image8& raw, int threshold) {
    if (raw.channels != 1) {
        throw InvalidArgument("expected a single-channel mask, got " +
                              std::to_string(raw.channels) + " channels");
    }
    if (raw.pixels.size() !=
        static_cast<std::size_t>(raw.width) * static_cast<std::size_t>(raw.height)) {
        throw InvalidArgument("image buffer does not match its dimensions");
    }
    std::vector<std::uint8_t> out(raw.pixels.size());
    std::transform(raw.pixels.begin(), raw.pixels.end(), out.begin(),
                   [threshold](std::uint8_t v) { return static_cast<std::uint8_t>(v > threshold); });
    return BinaryMask(raw.width, raw.height, std::move(out));
}

Image8 to_image8(const BinaryMask& mask) {
    Image8 img;
    img.width = mask.width();
    img.height = mask.height();
    img.channels = 1;
    img.pixels.resize(mask.size());
    auto src = mask.data();
    std::transform(src.begin(), src.end(), img.pixels.begin(),
                   [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
    return img;
}

}  // namespace promptseg
