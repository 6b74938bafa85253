#include "promptseg/records_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "promptseg/error.hpp"

namespace promptseg {

namespace fs = std::filesystem;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ParseError("bad " + what + " value '" + s + "'");
    }
    return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string records_csv(const std::vector<MetricRecord>& records) {
    std::string out = "image_id,lesion_class,dice,iou,pixel_accuracy\n";
    for (const auto& r : records) {
        out += r.image_id;
        out += ',';
        out += to_string(r.lesion_class);
        out += ',';
        out += format_double(r.dice);
        out += ',';
        out += format_double(r.iou);
        out += ',';
        out += format_double(r.pixel_accuracy);
        out += '\n';
    }
    return out;
}

void write_records(const fs::path& path, const std::vector<MetricRecord>& records) {
    write_text_file(path, records_csv(records));
}

std::vector<MetricRecord> read_records(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) return {};
    const auto header = split_csv_line(line);
    const std::vector<std::string> expected = {"image_id", "lesion_class", "dice", "iou",
                                               "pixel_accuracy"};
    if (header != expected) throw ParseError("unexpected records header in " + path.string());

    std::vector<MetricRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 5) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected 5 fields");
        }
        MetricRecord r;
        r.image_id = f[0];
        r.lesion_class = parse_lesion_class(f[1]);
        r.dice = parse_double(f[2], "dice");
        r.iou = parse_double(f[3], "iou");
        r.pixel_accuracy = parse_double(f[4], "pixel_accuracy");
        records.push_back(std::move(r));
    }
    return records;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + path.string());
        out << content;
        if (!out) throw IoError("write failed: " + path.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move into place: " + path.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace promptseg
