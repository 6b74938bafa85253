#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "promptseg/dataset.hpp"
#include "promptseg/mask.hpp"
#include "promptseg/rng.hpp"

namespace promptseg {

struct Point {
    int x = 0;  // column
    int y = 0;  // row
    bool operator==(const Point&) const = default;
};

// Inclusive pixel coordinates. May lie partly outside the image until clamped.
struct Box {
    int x_min = 0;
    int y_min = 0;
    int x_max = 0;
    int y_max = 0;

    int width() const noexcept { return x_max - x_min + 1; }
    int height() const noexcept { return y_max - y_min + 1; }
    double center_x() const noexcept { return 0.5 * (x_min + x_max); }
    double center_y() const noexcept { return 0.5 * (y_min + y_max); }
    bool valid() const noexcept { return x_min <= x_max && y_min <= y_max; }
    bool within(int image_w, int image_h) const noexcept {
        return valid() && x_min >= 0 && y_min >= 0 && x_max < image_w && y_max < image_h;
    }
    bool contains(const Box& o) const noexcept {
        return x_min <= o.x_min && y_min <= o.y_min && x_max >= o.x_max && y_max >= o.y_max;
    }
    bool operator==(const Box&) const = default;
};

struct PerturbationConfig {
    int margin_px = 20;
    int max_shift_px = 30;
    double max_scale_frac = 0.10;
    // Scale factor drawn from [1, 1 + max_scale_frac] instead of the symmetric range.
    bool scale_one_sided = false;

    // margin only; what `--no-perturb` resolves to.
    static PerturbationConfig margin_only(int margin_px = 20) {
        return {margin_px, 0, 0.0, false};
    }
    static PerturbationConfig identity() { return {0, 0, 0.0, false}; }

    // Throws InvalidArgument on negative fields or max_scale_frac >= 1.
    void validate() const;
};

// The hand-supplied prompt a predictor sees for one image.
struct Prompt {
    Point point;
    int point_label = 1;  // foreground
    Box box;
    bool operator==(const Prompt&) const = default;
};

struct PromptSet {
    std::string image_id;
    Prompt prompt;
    std::uint64_t seed_used = 0;
    bool operator==(const PromptSet&) const = default;
};

// Intermediate boxes of one perturb_box call, pre-clamp except `clamped`.
struct PerturbTrace {
    Box expanded;
    int shift_x = 0;
    int shift_y = 0;
    Box shifted;
    double scale = 1.0;
    Box scaled;
    Box clamped;
};

// Smallest box holding every foreground pixel. Throws EmptyMask.
Box tight_bbox(const BinaryMask& mask);

// Uniform over foreground pixels. Throws EmptyMask.
Point sample_point(const BinaryMask& mask, SeededStream& rng);

// expand by margin -> shift per axis -> scale about the center -> clamp.
// The order is part of the contract. Throws DegenerateBox if nothing is left
// after clamping.
Box perturb_box(const Box& box, const PerturbationConfig& cfg, SeededStream& rng, int image_w,
                int image_h, PerturbTrace* trace = nullptr);

// Pure function of (mask, image_id, cfg, master_seed): the stream is keyed by
// stable_hash(master_seed, image_id).
PromptSet generate_prompts(const Sample& sample, const PerturbationConfig& cfg,
                           std::uint64_t master_seed, PerturbTrace* trace = nullptr);

// Point inside the image and on foreground, label 1, box clamped to the image.
// Returns an empty string when valid, else the reason.
std::string check_prompt(const Prompt& prompt, const BinaryMask& mask);

nlohmann::ordered_json to_json(const Prompt& p);
Prompt prompt_from_json(const nlohmann::json& j);

// One JSON object per line, {"image_id","point","point_label","box","seed"}.
std::string to_jsonl_line(const PromptSet& p);
PromptSet prompt_set_from_json(const nlohmann::json& j);
void write_prompts(const std::filesystem::path& path, std::vector<PromptSet> prompts);
std::vector<PromptSet> read_prompts(const std::filesystem::path& path);

}  // namespace promptseg
