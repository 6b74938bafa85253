#include "promptseg/image_io.hpp"

#include <utility>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "promptseg/error.hpp"

namespace promptseg {

namespace fs = std::filesystem;

namespace {

// OpenCV stores colour as BGR(A); the library exposes RGB(A).
void swap_red_blue(std::uint8_t* px, std::size_t count, int channels) {
    if (channels < 3) return;
    for (std::size_t i = 0; i < count; ++i) std::swap(px[i * channels], px[i * channels + 2]);
}

}  // namespace

Image8 read_image(const fs::path& path) {
    if (!fs::is_regular_file(path)) throw IoError("no such image file: " + path.string());
    cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw IoError("cannot decode image: " + path.string());
    if (mat.depth() != CV_8U) throw IoError("not an 8-bit image: " + path.string());

    if (!mat.isContinuous()) mat = mat.clone();

    Image8 img;
    img.width = mat.cols;
    img.height = mat.rows;
    img.channels = mat.channels();
    img.pixels.assign(mat.data, mat.data + mat.total() * mat.elemSize());
    swap_red_blue(img.pixels.data(), mat.total(), img.channels);
    return img;
}

ImageSize read_image_size(const fs::path& path) {
    const Image8 img = read_image(path);
    return {img.width, img.height};
}

void write_image(const fs::path& path, const Image8& image) {
    if (image.width < 1 || image.height < 1 || image.pixels.size() !=
        static_cast<std::size_t>(image.width) * image.height * image.channels) {
        throw InvalidArgument("malformed image buffer for " + path.string());
    }
    std::vector<std::uint8_t> buf = image.pixels;
    swap_red_blue(buf.data(), buf.size() / image.channels, image.channels);
    cv::Mat out(image.height, image.width, CV_8UC(image.channels), buf.data());
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    bool ok = false;
    try {
        ok = cv::imwrite(path.string(), out);
    } catch (const cv::Exception& e) {
        throw IoError("cannot write image " + path.string() + ": " + e.what());
    }
    if (!ok) throw IoError("cannot write image " + path.string());
}

BinaryMask read_mask(const fs::path& path, int threshold) {
    const Image8 raw = read_image(path);
    if (raw.channels != 1) {
        throw IoError("mask is not single-channel (" + std::to_string(raw.channels) +
                      " channels): " + path.string());
    }
    return binarize_mask(raw, threshold);
}

void write_mask(const fs::path& path, const BinaryMask& mask) { write_image(path, to_image8(mask)); }

}  // namespace promptseg
