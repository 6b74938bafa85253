#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptseg/lesion.hpp"
#include "promptseg/metrics.hpp"

namespace promptseg {

enum class Metric { Dice, Iou, PixelAccuracy };
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::Dice, Metric::Iou,
                                                      Metric::PixelAccuracy};

// "dice", "iou", "pixel_accuracy"
std::string_view to_string(Metric m) noexcept;
Metric parse_metric(std::string_view s);
double metric_value(const MetricRecord& r, Metric m) noexcept;

struct MeanVariance {
    double mean = 0.0;
    double variance = 0.0;  // population (divide by N)
    bool operator==(const MeanVariance&) const = default;
};

struct ClassStats {
    std::size_t n = 0;
    MeanVariance dice;
    MeanVariance iou;
    MeanVariance pixel_accuracy;

    const MeanVariance& get(Metric m) const noexcept;
    bool operator==(const ClassStats&) const = default;
};

struct RunSummary {
    std::string run_label;
    std::size_t n_samples = 0;
    double mean_dice = 0.0;
    double mean_iou = 0.0;
    double mean_accuracy = 0.0;
    std::map<LesionClass, ClassStats> per_class;  // observed classes only

    double overall(Metric m) const noexcept;
    bool operator==(const RunSummary&) const = default;
};

// Sorts by image_id before reducing, so the result is independent of input
// order. Throws InvalidArgument on empty input.
RunSummary summarize(std::vector<MetricRecord> records, std::string label);

// "0.86(0.01)"
std::string format_mean_variance(const MeanVariance& mv, int decimals = 2);

struct Histogram {
    std::string metric_name;
    std::vector<double> bin_edges;   // bins + 1 edges, edges[i] = i / bins
    std::vector<std::size_t> counts;
};

// Bins are (left, right]; the first bin also takes 0.0, so 1.0 lands in the
// last bin. Throws InvalidArgument for scores outside [0, 1] or bins < 1.
Histogram histogram(const std::vector<MetricRecord>& records, Metric metric, int bins = 20);

struct MetricComparison {
    Metric metric;
    double old_value = 0.0;
    double new_value = 0.0;
    std::optional<double> pct_improvement;  // empty when old_value == 0
    std::string error;
};

struct ComparisonReport {
    std::string baseline_label;
    std::string new_label;
    std::vector<MetricComparison> metrics;  // pixel_accuracy, dice, iou
};

// ((new - old) / old) * 100
double percentage_improvement(double old_value, double new_value);

ComparisonReport compare(const RunSummary& baseline, const RunSummary& candidate);

nlohmann::ordered_json to_json(const RunSummary& s);
RunSummary summary_from_json(const nlohmann::json& j);
RunSummary read_summary(const std::filesystem::path& path);
nlohmann::ordered_json to_json(const ComparisonReport& r);

// lesion_class,n,dice,iou,pixel_accuracy with mean(variance) cells, one row
// per observed class.
std::string per_class_csv(const RunSummary& s, bool table_order = false);
// bin_left,bin_right,count
std::string histogram_csv(const Histogram& h);
// Aligned text table for stdout.
std::string per_class_table(const RunSummary& s, bool table_order = true);
std::string comparison_table(const ComparisonReport& r);

struct ReportPaths {
    std::filesystem::path summary;
    std::filesystem::path per_class;
    std::vector<std::filesystem::path> histograms;
    std::optional<std::filesystem::path> comparison;
};

// summary.json, per_class.csv, hist_<metric>.csv and optionally
// comparison.json under out_dir. Throws IoError naming the path.
ReportPaths emit_reports(const RunSummary& summary, const std::vector<Histogram>& histograms,
                         const ComparisonReport* comparison, const std::filesystem::path& out_dir,
                         bool table_order = false);

}  // namespace promptseg
