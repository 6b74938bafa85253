#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "promptseg/dataset.hpp"
#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/records_io.hpp"
#include "support/fixtures.hpp"

namespace promptseg {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

TEST(LesionClass, ParsesCaseInsensitively) {
    EXPECT_EQ(parse_lesion_class("vasc"), LesionClass::VASC);
    EXPECT_EQ(parse_lesion_class("AkIeC"), LesionClass::AKIEC);
    EXPECT_EQ(parse_lesion_class("MEL"), LesionClass::MEL);
    EXPECT_THROW(parse_lesion_class("scc"), ParseError);
    EXPECT_THROW(parse_lesion_class(""), ParseError);
}

TEST(LesionClass, SevenDistinctTokensRoundTrip) {
    std::set<std::string_view> tokens;
    for (LesionClass c : kCanonicalClassOrder) {
        tokens.insert(to_string(c));
        EXPECT_EQ(parse_lesion_class(to_string(c)), c);
    }
    EXPECT_EQ(tokens.size(), 7u);
}

Image8 gray(int w, int h, std::vector<std::uint8_t> px) { return Image8{w, h, 1, std::move(px)}; }

TEST(BinarizeMask, ConstantImages) {
    EXPECT_EQ(binarize_mask(gray(3, 2, std::vector<std::uint8_t>(6, 255))).foreground_count(), 6u);
    EXPECT_EQ(binarize_mask(gray(3, 2, std::vector<std::uint8_t>(6, 0))).foreground_count(), 0u);
}

TEST(BinarizeMask, StrictlyGreaterThanThreshold) {
    const BinaryMask m = binarize_mask(gray(2, 2, {0, 128, 127, 255}), 127);
    const std::vector<std::uint8_t> expected = {0, 1, 0, 1};
    EXPECT_TRUE(std::equal(m.data().begin(), m.data().end(), expected.begin()));
    EXPECT_EQ(m.width(), 2);
    EXPECT_EQ(m.height(), 2);
}

TEST(BinarizeMask, RejectsMultiChannel) {
    Image8 rgb{2, 1, 3, std::vector<std::uint8_t>(6, 200)};
    EXPECT_THROW(binarize_mask(rgb), InvalidArgument);
}

TEST(BinarizeMask, IdempotentUnderReencoding) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const int w = 1 + static_cast<int>(rng() % 20), h = 1 + static_cast<int>(rng() % 20);
        std::vector<std::uint8_t> px(static_cast<std::size_t>(w * h));
        for (auto& v : px) v = static_cast<std::uint8_t>(rng());
        const BinaryMask once = binarize_mask(gray(w, h, px));
        const BinaryMask twice = binarize_mask(to_image8(once));
        EXPECT_EQ(once, twice);
    }
}

TEST(BinaryMask, RejectsBadData) {
    EXPECT_THROW(BinaryMask(0, 3), InvalidArgument);
    EXPECT_THROW(BinaryMask(2, 2, std::vector<std::uint8_t>{0, 1, 1}), InvalidArgument);
    EXPECT_THROW(BinaryMask(2, 1, std::vector<std::uint8_t>{0, 2}), InvalidArgument);
}

TEST(ImageIo, MaskPngRoundTrip) {
    TempDir dir("maskio");
    BinaryMask m(5, 4);
    m.set(1, 2, true);
    m.set(4, 3, true);
    write_mask(dir / "m.png", m);
    EXPECT_EQ(read_mask(dir / "m.png"), m);
    EXPECT_EQ(read_image_size(dir / "m.png"), (ImageSize{5, 4}));
}

TEST(LoadManifest, ThreeRowsSortedById) {
    TempDir dir("ingest3");
    testing::FixtureOptions opt;
    opt.count = 3;
    const auto fx = testing::write_fixture(dir.path(), opt);
    // Shuffle the CSV rows so sorting is observable.
    std::string csv = "image_id,dx\n" + fx.ids[2] + ",mel\n" + fx.ids[0] + ",nv\n" + fx.ids[1] + ",vasc\n";
    write_text_file(dir / "meta.csv", csv);

    const ManifestLoad load = load_manifest(dir.path(), dir / "meta.csv");
    EXPECT_FALSE(load.report.has_errors());
    ASSERT_EQ(load.manifest.entries.size(), 3u);
    EXPECT_EQ(load.manifest.ids(), (std::vector<std::string>{fx.ids[0], fx.ids[1], fx.ids[2]}));
    EXPECT_EQ(load.manifest.entries[1].lesion_class, LesionClass::VASC);
    EXPECT_EQ(load.manifest.entries[0].width, opt.width);
    EXPECT_GT(load.manifest.entries[0].foreground_pixels, 0u);
    EXPECT_EQ(load.manifest.entries[0].mask_path, "masks/" + fx.ids[0] + "_segmentation.png");
}

TEST(LoadManifest, MissingMaskNamesTheId) {
    TempDir dir("ingestmissing");
    testing::FixtureOptions opt;
    opt.count = 4;
    opt.omit_masks = {"ISIC_0000002"};
    const auto fx = testing::write_fixture(dir.path(), opt);
    const ManifestLoad load = load_manifest(fx.root, fx.metadata);
    ASSERT_EQ(load.report.error_count(), 1u);
    EXPECT_EQ(load.report.issues[0].image_id, "ISIC_0000002");
    EXPECT_NE(load.report.issues[0].message.find("mask"), std::string::npos);
    EXPECT_EQ(load.manifest.entries.size(), 3u);
}

TEST(LoadManifest, UnknownClassAndDuplicateIdAreErrors) {
    TempDir dir("ingestbad");
    testing::FixtureOptions opt;
    opt.count = 3;
    const auto fx = testing::write_fixture(dir.path(), opt);
    write_text_file(dir / "meta.csv", "image_id,dx\n" + fx.ids[0] + ",nv\n" + fx.ids[1] +
                                          ",unknown\n" + fx.ids[0] + ",mel\n");
    const ManifestLoad load = load_manifest(dir.path(), dir / "meta.csv");
    EXPECT_EQ(load.report.error_count(), 2u);
    ASSERT_EQ(load.manifest.entries.size(), 1u);
    EXPECT_EQ(load.manifest.entries[0].lesion_class, LesionClass::NV);
}

TEST(LoadManifest, MissingColumnsIsParseError) {
    TempDir dir("ingestcols");
    write_text_file(dir / "meta.csv", "image,diagnosis\nx,nv\n");
    EXPECT_THROW(load_manifest(dir.path(), dir / "meta.csv"), ParseError);
}

TEST(LoadManifest, DimensionMismatchBetweenImageAndMask) {
    TempDir dir("ingestdims");
    testing::FixtureOptions opt;
    opt.count = 2;
    const auto fx = testing::write_fixture(dir.path(), opt);
    write_mask(fx.root / "masks" / (fx.ids[1] + "_segmentation.png"), BinaryMask(10, 10, 1));
    const ManifestLoad load = load_manifest(fx.root, fx.metadata);
    ASSERT_EQ(load.report.error_count(), 1u);
    EXPECT_EQ(load.report.issues[0].image_id, fx.ids[1]);
}

TEST(LoadManifest, EmptyMaskKeptAndFlagged) {
    TempDir dir("ingestempty");
    testing::FixtureOptions opt;
    opt.count = 3;
    opt.empty_masks = {"ISIC_0000001"};
    const auto fx = testing::write_fixture(dir.path(), opt);
    const ManifestLoad load = load_manifest(fx.root, fx.metadata);
    EXPECT_FALSE(load.report.has_errors());
    ASSERT_EQ(load.report.issues.size(), 1u);
    EXPECT_EQ(load.report.issues[0].severity, Severity::Warning);
    ASSERT_EQ(load.manifest.entries.size(), 3u);
    EXPECT_TRUE(load.manifest.entries[1].empty_mask());
}

TEST(LoadManifest, JpegImagesAreFound) {
    TempDir dir("ingestjpg");
    testing::FixtureOptions opt;
    opt.count = 2;
    opt.jpeg_images = true;
    const auto fx = testing::write_fixture(dir.path(), opt);
    const ManifestLoad load = load_manifest(fx.root, fx.metadata);
    EXPECT_FALSE(load.report.has_errors());
    ASSERT_EQ(load.manifest.entries.size(), 2u);
    EXPECT_EQ(load.manifest.entries[0].image_path, "images/" + fx.ids[0] + ".jpg");
}

TEST(LoadManifest, SerializationIsByteStableAndIndependentOfJobs) {
    TempDir dir("ingeststable");
    testing::FixtureOptions opt;
    opt.count = 12;
    const auto fx = testing::write_fixture(dir.path(), opt);
    const std::string a = to_json(load_manifest(fx.root, fx.metadata, 1).manifest).dump(2);
    const std::string b = to_json(load_manifest(fx.root, fx.metadata, 4).manifest).dump(2);
    EXPECT_EQ(a, b);

    write_manifest(dir / "m.json", load_manifest(fx.root, fx.metadata).manifest);
    const DatasetManifest back = read_manifest(dir / "m.json");
    EXPECT_EQ(to_json(back).dump(2), a);
    const Sample s = load_sample(back, back.entries[3]);
    EXPECT_EQ(s.mask.foreground_count(), back.entries[3].foreground_pixels);
}

DatasetManifest synthetic_manifest(std::size_t n) {
    DatasetManifest m;
    for (std::size_t i = 0; i < n; ++i) {
        ManifestEntry e;
        char id[32];
        std::snprintf(id, sizeof id, "id_%04zu", i);
        e.image_id = id;
        e.lesion_class = kCanonicalClassOrder[(i * 5 + i / 3) % kLesionClassCount];
        e.width = e.height = 8;
        e.foreground_pixels = 1;
        m.entries.push_back(e);
    }
    return m;
}

TEST(SplitDataset, EightyTwentyOnTen) {
    const DatasetManifest m = synthetic_manifest(10);
    const SplitSpec s = split_dataset(m, 0.8, 42);
    EXPECT_EQ(s.train_ids.size(), 8u);
    EXPECT_EQ(s.val_ids.size(), 2u);
    std::set<std::string> all(s.train_ids.begin(), s.train_ids.end());
    for (const auto& id : s.val_ids) EXPECT_TRUE(all.insert(id).second);
    EXPECT_EQ(all.size(), 10u);
    EXPECT_TRUE(s.warnings.empty());
}

TEST(SplitDataset, Deterministic) {
    const DatasetManifest m = synthetic_manifest(25);
    EXPECT_EQ(split_dataset(m, 0.8, 9), split_dataset(m, 0.8, 9));
    EXPECT_NE(split_dataset(m, 0.8, 9).val_ids, split_dataset(m, 0.8, 10).val_ids);
}

TEST(SplitDataset, SingleSampleGoesToTrainWithWarning) {
    const SplitSpec s = split_dataset(synthetic_manifest(1), 0.8, 0);
    EXPECT_EQ(s.train_ids, std::vector<std::string>{"id_0000"});
    EXPECT_TRUE(s.val_ids.empty());
    ASSERT_EQ(s.warnings.size(), 1u);
}

TEST(SplitDataset, Errors) {
    EXPECT_THROW(split_dataset(DatasetManifest{}, 0.8, 0), InvalidArgument);
    EXPECT_THROW(split_dataset(synthetic_manifest(3), 1.0, 0), InvalidArgument);
    EXPECT_THROW(split_dataset(synthetic_manifest(3), 0.0, 0), InvalidArgument);
}

TEST(SplitDataset, PartitionPropertyRandomized) {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        const double f = std::uniform_real_distribution<double>(0.01, 0.99)(rng);
        const bool stratified = trial % 2 == 1;
        const DatasetManifest m = synthetic_manifest(n);
        const SplitSpec s = split_dataset(m, f, rng(), stratified);
        std::vector<std::string> merged = s.train_ids;
        merged.insert(merged.end(), s.val_ids.begin(), s.val_ids.end());
        std::sort(merged.begin(), merged.end());
        EXPECT_EQ(merged, m.ids());
        EXPECT_EQ(s.train_ids.size(), static_cast<std::size_t>(std::llround(f * n)))
            << "n=" << n << " f=" << f << " stratified=" << stratified;
    }
}

TEST(SplitDataset, StratifiedKeepsClassProportions) {
    DatasetManifest m = synthetic_manifest(70);
    for (std::size_t i = 0; i < m.entries.size(); ++i)
        m.entries[i].lesion_class = kCanonicalClassOrder[i % kLesionClassCount];  // 10 per class
    const SplitSpec s = split_dataset(m, 0.8, 3, true);
    std::map<LesionClass, int> train;
    for (const auto& id : s.train_ids) ++train[m.find(id)->lesion_class];
    for (const auto& [cls, count] : train) EXPECT_EQ(count, 8) << to_string(cls);
}

TEST(SplitDataset, JsonRoundTripAndSubsetSelection) {
    TempDir dir("splitjson");
    const DatasetManifest m = synthetic_manifest(10);
    const SplitSpec s = split_dataset(m, 0.8, 5);
    write_split(dir / "s.json", s);
    const SplitSpec back = read_split(dir / "s.json");
    EXPECT_EQ(back, s);
    EXPECT_EQ(select_entries(m, back, Subset::Val).size(), 2u);
    EXPECT_EQ(select_entries(m, back, Subset::Train).size(), 8u);
    EXPECT_EQ(select_entries(m, std::nullopt, Subset::All).size(), 10u);
    EXPECT_THROW(select_entries(m, std::nullopt, Subset::Val), InvalidArgument);
}

}  // namespace
}  // namespace promptseg
