#pragma once

#include <filesystem>

#include "promptseg/mask.hpp"

namespace promptseg {

struct ImageSize {
    int width = 0;
    int height = 0;
    bool operator==(const ImageSize&) const = default;
};

// Decodes any format OpenCV reads (PNG, JPEG) without channel conversion.
// Only 8-bit depth is accepted. Throws IoError.
Image8 read_image(const std::filesystem::path& path);

ImageSize read_image_size(const std::filesystem::path& path);

// Encoding is taken from the extension. Three-channel input is RGB.
void write_image(const std::filesystem::path& path, const Image8& image);

// Reads an 8-bit grayscale PNG and thresholds it.
BinaryMask read_mask(const std::filesystem::path& path,
                     int threshold = kDefaultBinarizeThreshold);

void write_mask(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace promptseg
