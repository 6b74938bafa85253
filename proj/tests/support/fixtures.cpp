#include "support/fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "promptseg/image_io.hpp"

namespace promptseg::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("promptseg_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

BinaryMask ellipse_mask(int width, int height, double cx, double cy, double rx, double ry) {
    BinaryMask m(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double dx = (x - cx) / rx;
            const double dy = (y - cy) / ry;
            m.set(x, y, dx * dx + dy * dy <= 1.0);
        }
    }
    return m;
}

Fixture write_fixture(const fs::path& root, const FixtureOptions& opt) {
    Fixture f;
    f.root = root;
    f.metadata = root / "metadata.csv";
    fs::create_directories(root / "images");
    fs::create_directories(root / "masks");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::string csv = "lesion_id,image_id,dx,dx_type,age,sex,localization\n";
    for (int i = 0; i < opt.count; ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "ISIC_%07d", i);
        const std::string image_id = id;
        const LesionClass cls = kCanonicalClassOrder[static_cast<std::size_t>(i) % kLesionClassCount];
        f.ids.push_back(image_id);
        f.classes.push_back(cls);

        Image8 img;
        img.width = opt.width;
        img.height = opt.height;
        img.channels = 3;
        img.pixels.resize(static_cast<std::size_t>(opt.width) * opt.height * 3);
        for (auto& px : img.pixels) px = static_cast<std::uint8_t>(rng() & 0xff);
        write_image(root / "images" / (image_id + (opt.jpeg_images ? ".jpg" : ".png")), img);

        const bool omit = std::find(opt.omit_masks.begin(), opt.omit_masks.end(), image_id) !=
                          opt.omit_masks.end();
        const bool empty = std::find(opt.empty_masks.begin(), opt.empty_masks.end(), image_id) !=
                           opt.empty_masks.end();
        if (!omit) {
            BinaryMask m(opt.width, opt.height);
            if (!empty) {
                const double cx = opt.width * (0.3 + 0.4 * unit(rng));
                const double cy = opt.height * (0.3 + 0.4 * unit(rng));
                const double rx = opt.width * (0.1 + 0.2 * unit(rng));
                const double ry = opt.height * (0.1 + 0.2 * unit(rng));
                m = ellipse_mask(opt.width, opt.height, cx, cy, rx, ry);
            }
            write_mask(root / "masks" / (image_id + "_segmentation.png"), m);
        }
        // dx tokens are lower case in the HAM10000 metadata.
        std::string dx(to_string(cls));
        std::transform(dx.begin(), dx.end(), dx.begin(), [](unsigned char c) { return std::tolower(c); });
        csv += "HAM_" + std::to_string(i) + "," + image_id + "," + dx + ",histo,50.0,male,back\n";
    }
    std::ofstream(f.metadata) << csv;
    return f;
}

ProcessResult run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> argv = {PROMPTSEG_CLI_PATH, "--quiet"};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, std::chrono::seconds(120));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace promptseg::testing
