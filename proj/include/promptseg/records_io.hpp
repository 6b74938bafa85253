#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "promptseg/metrics.hpp"

namespace promptseg {

// image_id,lesion_class,dice,iou,pixel_accuracy
// Scores use the shortest representation that round-trips exactly.
std::string records_csv(const std::vector<MetricRecord>& records);
void write_records(const std::filesystem::path& path, const std::vector<MetricRecord>& records);
std::vector<MetricRecord> read_records(const std::filesystem::path& path);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

// Writes via a temporary sibling and rename. Throws IoError.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// Splits one CSV line; handles double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace promptseg
