#pragma once
// Synthetic HAM10000-style corpora and helpers shared by the test binaries.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "promptseg/lesion.hpp"
#include "promptseg/mask.hpp"
#include "promptseg/subprocess.hpp"

namespace promptseg::testing {

// Fresh, empty directory under the system temp dir; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

private:
    std::filesystem::path path_;
};

struct FixtureOptions {
    int count = 10;
    int width = 64;
    int height = 48;
    std::uint64_t seed = 1;
    bool jpeg_images = false;
    std::vector<std::string> omit_masks;  // image_ids written to the CSV without a mask
    std::vector<std::string> empty_masks; // image_ids whose mask has no foreground
};

struct Fixture {
    std::filesystem::path root;
    std::filesystem::path metadata;
    std::vector<std::string> ids;
    std::vector<LesionClass> classes;
};

// Writes images/, masks/ and metadata.csv. Lesions are filled ellipses;
// ids are ISIC_00000NN, classes cycle through the canonical order.
Fixture write_fixture(const std::filesystem::path& root, const FixtureOptions& opt = {});

// Filled axis-aligned ellipse.
BinaryMask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry);

// Runs the built promptseg executable with the given arguments.
ProcessResult run_cli(const std::vector<std::string>& args);

std::string slurp(const std::filesystem::path& p);

}  // namespace promptseg::testing
