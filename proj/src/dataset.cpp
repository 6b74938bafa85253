#include "promptseg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/parallel.hpp"
#include "promptseg/records_io.hpp"
#include "promptseg/rng.hpp"
#include "promptseg/version.hpp"

namespace promptseg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

const ManifestEntry* DatasetManifest::find(std::string_view image_id) const {
    auto it = std::lower_bound(entries.begin(), entries.end(), image_id,
                               [](const ManifestEntry& e, std::string_view id) { return e.image_id < id; });
    if (it == entries.end() || it->image_id != image_id) return nullptr;
    return &*it;
}

std::vector<std::string> DatasetManifest::ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.image_id);
    return out;
}

bool ValidationReport::has_errors() const noexcept { return error_count() > 0; }

std::size_t ValidationReport::error_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(issues.begin(), issues.end(), [](const auto& i) {
        return i.severity == Severity::Error;
    }));
}

void ValidationReport::error(std::string id, std::string msg) {
    issues.push_back({std::move(id), Severity::Error, std::move(msg)});
}

void ValidationReport::warning(std::string id, std::string msg) {
    issues.push_back({std::move(id), Severity::Warning, std::move(msg)});
}

namespace {

struct CsvRow {
    std::size_t line = 0;
    std::string image_id;
    std::string dx;
};

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<CsvRow> read_metadata(const fs::path& csv) {
    std::istringstream in(read_text_file(csv));
    std::string line;
    if (!std::getline(in, line)) throw ParseError("metadata CSV is empty: " + csv.string());
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

    const auto header = split_csv_line(line);
    std::optional<std::size_t> id_col, dx_col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string h = trim(header[i]);
        if (h == "image_id") id_col = i;
        if (h == "dx") dx_col = i;
    }
    if (!id_col || !dx_col) {
        throw ParseError("metadata CSV needs 'image_id' and 'dx' columns: " + csv.string());
    }

    std::vector<CsvRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        CsvRow row;
        row.line = line_no;
        if (*id_col < f.size()) row.image_id = trim(f[*id_col]);
        if (*dx_col < f.size()) row.dx = trim(f[*dx_col]);
        rows.push_back(std::move(row));
    }
    return rows;
}

struct RowOutcome {
    std::optional<ManifestEntry> entry;
    ValidationReport report;
};

RowOutcome ingest_row(const fs::path& root, const CsvRow& row) {
    RowOutcome out;
    ManifestEntry e;
    e.image_id = row.image_id;
    try {
        e.lesion_class = parse_lesion_class(row.dx);
    } catch (const ParseError& err) {
        out.report.error(row.image_id, err.what());
        return out;
    }

    for (const char* ext : {".jpg", ".png", ".jpeg", ".JPG", ".PNG"}) {
        const fs::path rel = fs::path("images") / (row.image_id + ext);
        if (fs::is_regular_file(root / rel)) {
            e.image_path = rel.generic_string();
            break;
        }
    }
    const fs::path mask_rel = fs::path("masks") / (row.image_id + "_segmentation.png");
    const bool have_mask = fs::is_regular_file(root / mask_rel);
    if (e.image_path.empty()) out.report.error(row.image_id, "missing image file images/" + row.image_id + ".(jpg|png)");
    if (!have_mask) out.report.error(row.image_id, "missing mask file " + mask_rel.generic_string());
    if (out.report.has_errors()) return out;
    e.mask_path = mask_rel.generic_string();

    try {
        const BinaryMask mask = read_mask(root / mask_rel);
        const ImageSize img = read_image_size(root / e.image_path);
        if (img.width != mask.width() || img.height != mask.height()) {
            out.report.error(row.image_id, "mask is " + std::to_string(mask.width()) + "x" +
                                               std::to_string(mask.height()) + " but image is " +
                                               std::to_string(img.width) + "x" +
                                               std::to_string(img.height));
            return out;
        }
        e.width = mask.width();
        e.height = mask.height();
        e.foreground_pixels = mask.foreground_count();
    } catch (const Error& err) {
        out.report.error(row.image_id, err.what());
        return out;
    }
    if (e.empty_mask()) out.report.warning(row.image_id, "mask has no foreground pixels");
    out.entry = std::move(e);
    return out;
}

}  // namespace

ManifestLoad load_manifest(const fs::path& root, const fs::path& metadata_csv, unsigned jobs) {
    ManifestLoad result;
    result.manifest.source_root = root;

    std::vector<CsvRow> rows = read_metadata(metadata_csv);
    std::vector<CsvRow> unique_rows;
    std::set<std::string> seen;
    for (auto& row : rows) {
        if (row.image_id.empty()) {
            result.report.error("", "line " + std::to_string(row.line) + ": empty image_id");
            continue;
        }
        if (!seen.insert(row.image_id).second) {
            result.report.error(row.image_id, "duplicate image_id (line " + std::to_string(row.line) + ")");
            continue;
        }
        unique_rows.push_back(std::move(row));
    }
    std::sort(unique_rows.begin(), unique_rows.end(),
              [](const CsvRow& a, const CsvRow& b) { return a.image_id < b.image_id; });

    std::vector<RowOutcome> outcomes(unique_rows.size());
    parallel_for(unique_rows.size(), jobs,
                 [&](std::size_t i) { outcomes[i] = ingest_row(root, unique_rows[i]); });

    for (auto& o : outcomes) {
        for (auto& issue : o.report.issues) result.report.issues.push_back(std::move(issue));
        if (o.entry) result.manifest.entries.push_back(std::move(*o.entry));
    }
    return result;
}

ordered_json to_json(const DatasetManifest& manifest) {
    ordered_json j;
    j["metadata"] = {{"generator", build_id()}, {"format", "promptseg-manifest/1"}};
    j["source_root"] = manifest.source_root.generic_string();
    ordered_json entries = ordered_json::array();
    for (const auto& e : manifest.entries) {
        entries.push_back({{"image_id", e.image_id},
                           {"image_path", e.image_path},
                           {"mask_path", e.mask_path},
                           {"lesion_class", to_string(e.lesion_class)},
                           {"width", e.width},
                           {"height", e.height},
                           {"foreground_pixels", e.foreground_pixels},
                           {"empty_mask", e.empty_mask()}});
    }
    j["entries"] = std::move(entries);
    return j;
}

DatasetManifest manifest_from_json(const json& j) {
    try {
        DatasetManifest m;
        m.source_root = j.at("source_root").get<std::string>();
        for (const auto& je : j.at("entries")) {
            ManifestEntry e;
            e.image_id = je.at("image_id").get<std::string>();
            e.image_path = je.at("image_path").get<std::string>();
            e.mask_path = je.at("mask_path").get<std::string>();
            e.lesion_class = parse_lesion_class(je.at("lesion_class").get<std::string>());
            e.width = je.at("width").get<int>();
            e.height = je.at("height").get<int>();
            e.foreground_pixels = je.at("foreground_pixels").get<std::uint64_t>();
            m.entries.push_back(std::move(e));
        }
        std::sort(m.entries.begin(), m.entries.end(),
                  [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
        for (std::size_t i = 1; i < m.entries.size(); ++i) {
            if (m.entries[i].image_id == m.entries[i - 1].image_id) {
                throw ParseError("duplicate image_id in manifest: " + m.entries[i].image_id);
            }
        }
        return m;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed manifest: ") + e.what());
    }
}

void write_manifest(const fs::path& path, const DatasetManifest& manifest) {
    write_text_file(path, to_json(manifest).dump(2) + "\n");
}

DatasetManifest read_manifest(const fs::path& path) {
    try {
        return manifest_from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ordered_json to_json(const ValidationReport& report) {
    ordered_json issues = ordered_json::array();
    std::size_t warnings = 0;
    for (const auto& i : report.issues) {
        if (i.severity == Severity::Warning) ++warnings;
        issues.push_back({{"image_id", i.image_id},
                          {"severity", i.severity == Severity::Error ? "error" : "warning"},
                          {"message", i.message}});
    }
    return {{"errors", report.error_count()}, {"warnings", warnings}, {"issues", std::move(issues)}};
}

Sample load_sample(const DatasetManifest& manifest, const ManifestEntry& entry) {
    BinaryMask mask = read_mask(manifest.source_root / entry.mask_path);
    if (mask.width() != entry.width || mask.height() != entry.height) {
        throw DimensionMismatch("mask for " + entry.image_id + " changed size since ingest");
    }
    return Sample{entry.image_id, manifest.source_root / entry.image_path, std::move(mask),
                  entry.lesion_class};
}

namespace {

template <typename T>
void shuffle_in_place(std::vector<T>& v, SeededStream& rng) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace

SplitSpec split_dataset(const DatasetManifest& manifest, double train_fraction,
                        std::uint64_t seed, bool stratified) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw InvalidArgument("train fraction must lie in (0, 1)");
    }
    if (manifest.entries.empty()) throw InvalidArgument("cannot split an empty manifest");

    SplitSpec split;
    split.train_fraction = train_fraction;
    split.seed = seed;
    split.stratified = stratified;

    const std::size_t n = manifest.entries.size();
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    SeededStream rng(seed);

    if (!stratified) {
        std::vector<std::string> ids = manifest.ids();
        shuffle_in_place(ids, rng);
        split.train_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.val_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_train), ids.end());
    } else {
        std::map<LesionClass, std::vector<std::string>> groups;
        for (const auto& e : manifest.entries) groups[e.lesion_class].push_back(e.image_id);

        struct Quota {
            LesionClass cls;
            std::size_t take;
            double remainder;
        };
        std::vector<Quota> quotas;
        std::size_t assigned = 0;
        for (LesionClass c : kCanonicalClassOrder) {
            auto it = groups.find(c);
            if (it == groups.end()) continue;
            shuffle_in_place(it->second, rng);
            const double exact = train_fraction * static_cast<double>(it->second.size());
            const auto base = static_cast<std::size_t>(std::floor(exact));
            quotas.push_back({c, base, exact - static_cast<double>(base)});
            assigned += base;
        }
        std::vector<std::size_t> order(quotas.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return quotas[a].remainder > quotas[b].remainder;
        });
        for (std::size_t k = 0; assigned < n_train && k < order.size(); ++k) {
            Quota& q = quotas[order[k]];
            if (q.take < groups[q.cls].size()) {
                ++q.take;
                ++assigned;
            }
        }
        for (const auto& q : quotas) {
            const auto& ids = groups[q.cls];
            split.train_ids.insert(split.train_ids.end(), ids.begin(),
                                   ids.begin() + static_cast<std::ptrdiff_t>(q.take));
            split.val_ids.insert(split.val_ids.end(),
                                 ids.begin() + static_cast<std::ptrdiff_t>(q.take), ids.end());
        }
    }

    std::sort(split.train_ids.begin(), split.train_ids.end());
    std::sort(split.val_ids.begin(), split.val_ids.end());
    if (split.val_ids.empty()) split.warnings.push_back("validation split is empty");
    if (split.train_ids.empty()) split.warnings.push_back("training split is empty");
    return split;
}

ordered_json to_json(const SplitSpec& split) {
    ordered_json j;
    j["metadata"] = {{"generator", build_id()}, {"format", "promptseg-split/1"}};
    j["seed"] = split.seed;
    j["train_fraction"] = split.train_fraction;
    j["stratified"] = split.stratified;
    j["n_train"] = split.train_ids.size();
    j["n_val"] = split.val_ids.size();
    j["train_ids"] = split.train_ids;
    j["val_ids"] = split.val_ids;
    j["warnings"] = split.warnings;
    return j;
}

SplitSpec split_from_json(const json& j) {
    try {
        SplitSpec s;
        s.seed = j.at("seed").get<std::uint64_t>();
        s.train_fraction = j.at("train_fraction").get<double>();
        s.stratified = j.value("stratified", false);
        s.train_ids = j.at("train_ids").get<std::vector<std::string>>();
        s.val_ids = j.at("val_ids").get<std::vector<std::string>>();
        s.warnings = j.value("warnings", std::vector<std::string>{});
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed split: ") + e.what());
    }
}

void write_split(const fs::path& path, const SplitSpec& split) {
    write_text_file(path, to_json(split).dump(2) + "\n");
}

SplitSpec read_split(const fs::path& path) {
    try {
        return split_from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

Subset parse_subset(std::string_view s) {
    if (s == "train") return Subset::Train;
    if (s == "val") return Subset::Val;
    if (s == "all") return Subset::All;
    throw InvalidArgument("subset must be train, val or all, got '" + std::string(s) + "'");
}

std::vector<ManifestEntry> select_entries(const DatasetManifest& manifest,
                                          const std::optional<SplitSpec>& split, Subset subset) {
    if (subset == Subset::All || !split) {
        if (!split && subset != Subset::All) {
            throw InvalidArgument("a split file is required to select train or val");
        }
        return manifest.entries;
    }
    const auto& ids = subset == Subset::Train ? split->train_ids : split->val_ids;
    std::vector<ManifestEntry> out;
    out.reserve(ids.size());
    for (const auto& id : ids) {
        const ManifestEntry* e = manifest.find(id);
        if (!e) throw InvalidArgument("split references unknown image_id " + id);
        out.push_back(*e);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    return out;
}

}  // namespace promptseg
