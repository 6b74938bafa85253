#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace promptseg {

// Row-major binary grid, 1 = lesion foreground.
class BinaryMask {
public:
    BinaryMask(int width, int height, std::uint8_t fill = 0);
    // Throws InvalidArgument unless data.size() == width*height and every value is 0 or 1.
    BinaryMask(int width, int height, std::vector<std::uint8_t> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::uint8_t at(int x, int y) const noexcept { return data_[index(x, y)]; }
    void set(int x, int y, bool on) noexcept { data_[index(x, y)] = on ? 1 : 0; }
    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::span<const std::uint8_t> data() const noexcept { return data_; }

    std::size_t foreground_count() const noexcept;
    bool empty_foreground() const noexcept { return foreground_count() == 0; }

    BinaryMask complement() const;

    bool operator==(const BinaryMask&) const = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_;
    int height_;
    std::vector<std::uint8_t> data_;
};

// Single- or multi-channel 8-bit raster as read from disk.
struct Image8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;  // interleaved, row-major
};

inline constexpr int kDefaultBinarizeThreshold = 127;

// 1 iff pixel > threshold. Throws InvalidArgument on multi-channel input.
BinaryMask binarize_mask(const Image8& raw, int threshold = kDefaultBinarizeThreshold);

// 0/255 encoding, the on-disk mask convention.
Image8 to_image8(const BinaryMask& mask);

}  // namespace promptseg
