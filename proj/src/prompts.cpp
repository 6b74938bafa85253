#include "promptseg/prompts.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "promptseg/error.hpp"
#include "promptseg/records_io.hpp"

namespace promptseg {

using nlohmann::json;
using nlohmann::ordered_json;

void PerturbationConfig::validate() const {
    if (margin_px < 0 || max_shift_px < 0 || max_scale_frac < 0.0) {
        throw InvalidArgument("perturbation parameters must be non-negative");
    }
    if (!(max_scale_frac < 1.0)) throw InvalidArgument("max_scale_frac must be < 1");
}

Box tight_bbox(const BinaryMask& mask) {
    Box b{mask.width(), mask.height(), -1, -1};
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y)) continue;
            b.x_min = std::min(b.x_min, x);
            b.y_min = std::min(b.y_min, y);
            b.x_max = std::max(b.x_max, x);
            b.y_max = std::max(b.y_max, y);
        }
    }
    if (b.x_max < 0) throw EmptyMask();
    return b;
}

Point sample_point(const BinaryMask& mask, SeededStream& rng) {
    const std::size_t count = mask.foreground_count();
    if (count == 0) throw EmptyMask();
    std::size_t k = static_cast<std::size_t>(rng.uniform_below(count));
    const auto data = mask.data();
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data[i]) continue;
        if (k-- == 0) {
            return {static_cast<int>(i % static_cast<std::size_t>(mask.width())),
                    static_cast<int>(i / static_cast<std::size_t>(mask.width()))};
        }
    }
    throw EmptyMask();  // unreachable
}

namespace {

// Resizes one axis about its center; the extent is rounded half away from zero.
void scale_axis(int lo, int hi, double factor, int& out_lo, int& out_hi) {
    const int extent = hi - lo + 1;
    const int scaled = std::max(1, static_cast<int>(std::round(extent * factor)));
    const double center = 0.5 * (lo + hi);
    out_lo = static_cast<int>(std::round(center - 0.5 * (scaled - 1)));
    out_hi = out_lo + scaled - 1;
}

}  // namespace

Box perturb_box(const Box& box, const PerturbationConfig& cfg, SeededStream& rng, int image_w,
                int image_h, PerturbTrace* trace) {
    cfg.validate();
    if (!box.within(image_w, image_h)) throw InvalidArgument("box lies outside the image");

    const Box expanded{box.x_min - cfg.margin_px, box.y_min - cfg.margin_px,
                       box.x_max + cfg.margin_px, box.y_max + cfg.margin_px};

    const auto dx = static_cast<int>(rng.uniform_int(-cfg.max_shift_px, cfg.max_shift_px));
    const auto dy = static_cast<int>(rng.uniform_int(-cfg.max_shift_px, cfg.max_shift_px));
    const Box shifted{expanded.x_min + dx, expanded.y_min + dy, expanded.x_max + dx,
                      expanded.y_max + dy};

    const double lo = cfg.scale_one_sided ? 1.0 : 1.0 - cfg.max_scale_frac;
    const double factor = rng.uniform_real(lo, 1.0 + cfg.max_scale_frac);
    Box scaled;
    scale_axis(shifted.x_min, shifted.x_max, factor, scaled.x_min, scaled.x_max);
    scale_axis(shifted.y_min, shifted.y_max, factor, scaled.y_min, scaled.y_max);

    const Box clamped{std::max(scaled.x_min, 0), std::max(scaled.y_min, 0),
                      std::min(scaled.x_max, image_w - 1), std::min(scaled.y_max, image_h - 1)};
    if (trace) *trace = {expanded, dx, dy, shifted, factor, scaled, clamped};
    if (!clamped.valid()) throw DegenerateBox("perturbed box falls outside the image");
    return clamped;
}

PromptSet generate_prompts(const Sample& sample, const PerturbationConfig& cfg,
                           std::uint64_t master_seed, PerturbTrace* trace) {
    const std::uint64_t stream_seed = stable_hash(master_seed, sample.image_id);
    SeededStream rng(stream_seed);
    try {
        PromptSet out;
        out.image_id = sample.image_id;
        out.seed_used = stream_seed;
        out.prompt.point = sample_point(sample.mask, rng);
        out.prompt.box = perturb_box(tight_bbox(sample.mask), cfg, rng, sample.mask.width(),
                                     sample.mask.height(), trace);
        return out;
    } catch (const EmptyMask&) {
        throw EmptyMask(sample.image_id);
    } catch (const DegenerateBox& e) {
        throw DegenerateBox(sample.image_id + ": " + e.what());
    }
}

std::string check_prompt(const Prompt& prompt, const BinaryMask& mask) {
    const Point& p = prompt.point;
    if (!mask.contains(p.x, p.y)) return "point lies outside the image";
    if (!mask.at(p.x, p.y)) return "point is not on a foreground pixel";
    if (prompt.point_label != 1) return "point_label must be 1";
    if (!prompt.box.within(mask.width(), mask.height())) return "box is not within the image";
    return {};
}

ordered_json to_json(const Prompt& p) {
    return {{"point", {p.point.x, p.point.y}},
            {"point_label", p.point_label},
            {"box", {p.box.x_min, p.box.y_min, p.box.x_max, p.box.y_max}}};
}

namespace {

Prompt prompt_fields(const json& j) {
    const auto& pt = j.at("point");
    const auto& bx = j.at("box");
    if (!pt.is_array() || pt.size() != 2) throw ParseError("point must be [x, y]");
    if (!bx.is_array() || bx.size() != 4) throw ParseError("box must be [x_min, y_min, x_max, y_max]");
    Prompt p;
    p.point = {pt[0].get<int>(), pt[1].get<int>()};
    p.point_label = j.value("point_label", 1);
    p.box = {bx[0].get<int>(), bx[1].get<int>(), bx[2].get<int>(), bx[3].get<int>()};
    if (!p.box.valid()) throw ParseError("box has min > max");
    return p;
}

}  // namespace

Prompt prompt_from_json(const json& j) {
    try {
        return prompt_fields(j);
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed prompt: ") + e.what());
    }
}

std::string to_jsonl_line(const PromptSet& p) {
    ordered_json j;
    j["image_id"] = p.image_id;
    j["point"] = {p.prompt.point.x, p.prompt.point.y};
    j["point_label"] = p.prompt.point_label;
    j["box"] = {p.prompt.box.x_min, p.prompt.box.y_min, p.prompt.box.x_max, p.prompt.box.y_max};
    j["seed"] = p.seed_used;
    return j.dump();
}

PromptSet prompt_set_from_json(const json& j) {
    try {
        PromptSet p;
        p.image_id = j.at("image_id").get<std::string>();
        p.prompt = prompt_fields(j);
        p.seed_used = j.value("seed", std::uint64_t{0});
        return p;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed prompt record: ") + e.what());
    }
}

void write_prompts(const std::filesystem::path& path, std::vector<PromptSet> prompts) {
    std::sort(prompts.begin(), prompts.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    std::string out;
    for (const auto& p : prompts) {
        out += to_jsonl_line(p);
        out += '\n';
    }
    write_text_file(path, out);
}

std::vector<PromptSet> read_prompts(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<PromptSet> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(prompt_set_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

}  // namespace promptseg
