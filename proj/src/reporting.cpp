#include "promptseg/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "promptseg/error.hpp"
#include "promptseg/records_io.hpp"
#include "promptseg/version.hpp"

namespace promptseg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Metric m) noexcept {
    switch (m) {
        case Metric::Dice: return "dice";
        case Metric::Iou: return "iou";
        case Metric::PixelAccuracy: return "pixel_accuracy";
    }
    return "?";
}

Metric parse_metric(std::string_view s) {
    for (Metric m : kAllMetrics) {
        if (s == to_string(m)) return m;
    }
    throw InvalidArgument("unknown metric '" + std::string(s) + "'");
}

double metric_value(const MetricRecord& r, Metric m) noexcept {
    switch (m) {
        case Metric::Dice: return r.dice;
        case Metric::Iou: return r.iou;
        case Metric::PixelAccuracy: return r.pixel_accuracy;
    }
    return 0.0;
}

const MeanVariance& ClassStats::get(Metric m) const noexcept {
    switch (m) {
        case Metric::Dice: return dice;
        case Metric::Iou: return iou;
        case Metric::PixelAccuracy: return pixel_accuracy;
    }
    return dice;
}

double RunSummary::overall(Metric m) const noexcept {
    switch (m) {
        case Metric::Dice: return mean_dice;
        case Metric::Iou: return mean_iou;
        case Metric::PixelAccuracy: return mean_accuracy;
    }
    return 0.0;
}

namespace {

MeanVariance mean_variance(const std::vector<const MetricRecord*>& rs, Metric m) {
    double sum = 0.0;
    for (const auto* r : rs) sum += metric_value(*r, m);
    const double n = static_cast<double>(rs.size());
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto* r : rs) {
        const double d = metric_value(*r, m) - mean;
        sq += d * d;
    }
    return {mean, sq / n};
}

}  // namespace

RunSummary summarize(std::vector<MetricRecord> records, std::string label) {
    if (records.empty()) throw InvalidArgument("cannot summarize an empty record set");
    std::sort(records.begin(), records.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });

    RunSummary s;
    s.run_label = std::move(label);
    s.n_samples = records.size();

    std::vector<const MetricRecord*> all;
    std::map<LesionClass, std::vector<const MetricRecord*>> groups;
    for (const auto& r : records) {
        all.push_back(&r);
        groups[r.lesion_class].push_back(&r);
    }
    s.mean_dice = mean_variance(all, Metric::Dice).mean;
    s.mean_iou = mean_variance(all, Metric::Iou).mean;
    s.mean_accuracy = mean_variance(all, Metric::PixelAccuracy).mean;
    for (const auto& [cls, rs] : groups) {
        s.per_class[cls] = ClassStats{rs.size(), mean_variance(rs, Metric::Dice),
                                      mean_variance(rs, Metric::Iou),
                                      mean_variance(rs, Metric::PixelAccuracy)};
    }
    return s;
}

std::string format_mean_variance(const MeanVariance& mv, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f(%.*f)", decimals, mv.mean, decimals, mv.variance);
    return buf;
}

Histogram histogram(const std::vector<MetricRecord>& records, Metric metric, int bins) {
    if (bins < 1) throw InvalidArgument("histogram needs at least one bin");
    if (records.empty()) throw InvalidArgument("cannot histogram an empty record set");
    Histogram h;
    h.metric_name = std::string(to_string(metric));
    h.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
    for (int i = 0; i <= bins; ++i) h.bin_edges[i] = static_cast<double>(i) / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);

    for (const auto& r : records) {
        const double v = metric_value(r, metric);
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidArgument(r.image_id + ": " + h.metric_name + " " + format_double(v) +
                                  " outside [0, 1]");
        }
        const auto it = std::lower_bound(h.bin_edges.begin() + 1, h.bin_edges.end(), v);
        ++h.counts[static_cast<std::size_t>(it - (h.bin_edges.begin() + 1))];
    }
    return h;
}

double percentage_improvement(double old_value, double new_value) {
    return ((new_value - old_value) / old_value) * 100.0;
}

ComparisonReport compare(const RunSummary& baseline, const RunSummary& candidate) {
    if (baseline.n_samples == 0 || candidate.n_samples == 0) {
        throw InvalidArgument("comparison needs two non-empty summaries");
    }
    ComparisonReport r;
    r.baseline_label = baseline.run_label;
    r.new_label = candidate.run_label;
    for (Metric m : {Metric::PixelAccuracy, Metric::Dice, Metric::Iou}) {
        MetricComparison c{m, baseline.overall(m), candidate.overall(m), std::nullopt, {}};
        if (c.old_value == 0.0) c.error = "baseline mean is zero";
        else c.pct_improvement = percentage_improvement(c.old_value, c.new_value);
        r.metrics.push_back(std::move(c));
    }
    return r;
}

namespace {

ordered_json mv_json(const MeanVariance& mv) {
    return {{"mean", mv.mean}, {"variance", mv.variance}};
}

MeanVariance mv_from(const json& j) {
    return {j.at("mean").get<double>(), j.at("variance").get<double>()};
}

}  // namespace

ordered_json to_json(const RunSummary& s) {
    ordered_json j;
    j["metadata"] = {{"generator", build_id()},
                     {"format", "promptseg-summary/1"},
                     {"variance", "population"}};
    j["run_label"] = s.run_label;
    j["n_samples"] = s.n_samples;
    j["overall"] = {{"mean_dice", s.mean_dice},
                    {"mean_iou", s.mean_iou},
                    {"mean_pixel_accuracy", s.mean_accuracy}};
    ordered_json pc = ordered_json::object();
    for (LesionClass c : kCanonicalClassOrder) {
        auto it = s.per_class.find(c);
        if (it == s.per_class.end()) continue;
        pc[std::string(to_string(c))] = {{"n", it->second.n},
                                         {"dice", mv_json(it->second.dice)},
                                         {"iou", mv_json(it->second.iou)},
                                         {"pixel_accuracy", mv_json(it->second.pixel_accuracy)}};
    }
    j["per_class"] = std::move(pc);
    return j;
}

RunSummary summary_from_json(const json& j) {
    try {
        RunSummary s;
        s.run_label = j.value("run_label", std::string{});
        s.n_samples = j.at("n_samples").get<std::size_t>();
        const auto& o = j.at("overall");
        s.mean_dice = o.at("mean_dice").get<double>();
        s.mean_iou = o.at("mean_iou").get<double>();
        s.mean_accuracy = o.at("mean_pixel_accuracy").get<double>();
        if (j.contains("per_class")) {
            for (const auto& [name, v] : j["per_class"].items()) {
                s.per_class[parse_lesion_class(name)] =
                    ClassStats{v.at("n").get<std::size_t>(), mv_from(v.at("dice")),
                               mv_from(v.at("iou")), mv_from(v.at("pixel_accuracy"))};
            }
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed summary: ") + e.what());
    }
}

RunSummary read_summary(const fs::path& path) {
    try {
        return summary_from_json(json::parse(read_text_file(path)));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

ordered_json to_json(const ComparisonReport& r) {
    ordered_json j;
    j["metadata"] = {{"generator", build_id()}, {"format", "promptseg-comparison/1"}};
    j["baseline_label"] = r.baseline_label;
    j["new_label"] = r.new_label;
    ordered_json ms = ordered_json::object();
    for (const auto& c : r.metrics) {
        ordered_json e = {{"old", c.old_value}, {"new", c.new_value}};
        if (c.pct_improvement) e["pct_improvement"] = *c.pct_improvement;
        else e["error"] = c.error;
        ms[std::string(to_string(c.metric))] = std::move(e);
    }
    j["metrics"] = std::move(ms);
    return j;
}

namespace {

const auto& class_order(bool table_order) {
    return table_order ? kTableClassOrder : kCanonicalClassOrder;
}

}  // namespace

std::string per_class_csv(const RunSummary& s, bool table_order) {
    std::string out = "lesion_class,n,dice,iou,pixel_accuracy\n";
    for (LesionClass c : class_order(table_order)) {
        auto it = s.per_class.find(c);
        if (it == s.per_class.end()) continue;
        out += std::string(to_string(c)) + "," + std::to_string(it->second.n) + "," +
               format_mean_variance(it->second.dice) + "," + format_mean_variance(it->second.iou) +
               "," + format_mean_variance(it->second.pixel_accuracy) + "\n";
    }
    return out;
}

std::string histogram_csv(const Histogram& h) {
    std::string out = "bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        out += format_double(h.bin_edges[i]) + "," + format_double(h.bin_edges[i + 1]) + "," +
               std::to_string(h.counts[i]) + "\n";
    }
    return out;
}

std::string per_class_table(const RunSummary& s, bool table_order) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof line, "%-12s %6s %-12s %-12s %-12s\n", "Lesion Type", "n",
                  "Dice Score", "IoU Score", "Accuracy");
    out += line;
    for (LesionClass c : class_order(table_order)) {
        auto it = s.per_class.find(c);
        if (it == s.per_class.end()) continue;
        std::snprintf(line, sizeof line, "%-12s %6zu %-12s %-12s %-12s\n",
                      std::string(to_string(c)).c_str(), it->second.n,
                      format_mean_variance(it->second.dice).c_str(),
                      format_mean_variance(it->second.iou).c_str(),
                      format_mean_variance(it->second.pixel_accuracy).c_str());
        out += line;
    }
    return out;
}

std::string comparison_table(const ComparisonReport& r) {
    char line[160];
    std::string out;
    std::snprintf(line, sizeof line, "%-16s %10s %10s %12s\n", "metric",
                  r.baseline_label.empty() ? "baseline" : r.baseline_label.c_str(),
                  r.new_label.empty() ? "new" : r.new_label.c_str(), "improvement");
    out += line;
    for (const auto& c : r.metrics) {
        if (c.pct_improvement) {
            std::snprintf(line, sizeof line, "%-16s %10.4f %10.4f %+11.2f%%\n",
                          std::string(to_string(c.metric)).c_str(), c.old_value, c.new_value,
                          *c.pct_improvement);
        } else {
            std::snprintf(line, sizeof line, "%-16s %10.4f %10.4f %12s\n",
                          std::string(to_string(c.metric)).c_str(), c.old_value, c.new_value,
                          c.error.c_str());
        }
        out += line;
    }
    return out;
}

ReportPaths emit_reports(const RunSummary& summary, const std::vector<Histogram>& histograms,
                         const ComparisonReport* comparison, const fs::path& out_dir,
                         bool table_order) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    ReportPaths paths;
    paths.summary = out_dir / "summary.json";
    write_text_file(paths.summary, to_json(summary).dump(2) + "\n");
    paths.per_class = out_dir / "per_class.csv";
    write_text_file(paths.per_class, per_class_csv(summary, table_order));
    for (const auto& h : histograms) {
        const fs::path p = out_dir / ("hist_" + h.metric_name + ".csv");
        write_text_file(p, histogram_csv(h));
        paths.histograms.push_back(p);
    }
    if (comparison) {
        paths.comparison = out_dir / "comparison.json";
        write_text_file(*paths.comparison, to_json(*comparison).dump(2) + "\n");
    }
    return paths;
}

}  // namespace promptseg
