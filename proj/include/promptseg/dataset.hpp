#pragma once
// HAM10000-style corpus ingest:
//
//   <root>/images/<image_id>.jpg|png
//   <root>/masks/<image_id>_segmentation.png
//   metadata CSV with at least `image_id` and `dx` columns
//
// The manifest records relative paths and mask statistics, not pixel data;
// masks are reloaded on demand through load_sample().
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptseg/lesion.hpp"
#include "promptseg/mask.hpp"

namespace promptseg {

struct ManifestEntry {
    std::string image_id;
    std::string image_path;  // relative to source_root
    std::string mask_path;   // relative to source_root
    LesionClass lesion_class = LesionClass::NV;
    int width = 0;
    int height = 0;
    std::uint64_t foreground_pixels = 0;

    bool empty_mask() const noexcept { return foreground_pixels == 0; }
    bool operator==(const ManifestEntry&) const = default;
};

struct DatasetManifest {
    std::filesystem::path source_root;
    std::vector<ManifestEntry> entries;  // sorted by image_id, unique

    const ManifestEntry* find(std::string_view image_id) const;
    std::vector<std::string> ids() const;

    bool operator==(const DatasetManifest&) const = default;
};

enum class Severity { Warning, Error };

struct ValidationIssue {
    std::string image_id;  // empty for file-level issues
    Severity severity = Severity::Error;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool has_errors() const noexcept;
    std::size_t error_count() const noexcept;
    void error(std::string id, std::string msg);
    void warning(std::string id, std::string msg);
};

struct ManifestLoad {
    DatasetManifest manifest;  // only rows without errors
    ValidationReport report;
};

// Rows are decoded in parallel (`jobs` = 0 means hardware concurrency);
// the result does not depend on the job count.
ManifestLoad load_manifest(const std::filesystem::path& root,
                           const std::filesystem::path& metadata_csv, unsigned jobs = 0);

nlohmann::ordered_json to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ValidationReport& report);

struct Sample {
    std::string image_id;
    std::filesystem::path image_path;
    BinaryMask mask;
    LesionClass lesion_class;
};

// Reads the mask from disk. Throws IoError or DimensionMismatch if the file
// no longer matches the manifest.
Sample load_sample(const DatasetManifest& manifest, const ManifestEntry& entry);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::vector<std::string> train_ids;  // sorted
    std::vector<std::string> val_ids;    // sorted
    std::vector<std::string> warnings;

    bool operator==(const SplitSpec&) const = default;
};

// Seeded Fisher-Yates over the id-sorted manifest; the first
// round(train_fraction * N) ids go to train. With `stratified`, each class
// is shuffled separately and per-class quotas are allocated by largest
// remainder so the train total is still round(train_fraction * N).
SplitSpec split_dataset(const DatasetManifest& manifest, double train_fraction,
                        std::uint64_t seed, bool stratified = false);

nlohmann::ordered_json to_json(const SplitSpec& split);
SplitSpec split_from_json(const nlohmann::json& j);
void write_split(const std::filesystem::path& path, const SplitSpec& split);
SplitSpec read_split(const std::filesystem::path& path);

enum class Subset { Train, Val, All };
Subset parse_subset(std::string_view s);

// Entries of `manifest` in the requested part of the split, id-sorted.
std::vector<ManifestEntry> select_entries(const DatasetManifest& manifest,
                                          const std::optional<SplitSpec>& split, Subset subset);

}  // namespace promptseg
