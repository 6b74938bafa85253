#include "promptseg/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "promptseg/error.hpp"
#include "promptseg/image_io.hpp"
#include "promptseg/morphology.hpp"
#include "promptseg/parallel.hpp"
#include "promptseg/records_io.hpp"
#include "promptseg/subprocess.hpp"

namespace promptseg {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool starts_with(const std::string& s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.compare(0, prefix.size(), prefix) == 0;
}

int parse_int(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    int v = 0;
    try {
        v = std::stoi(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidArgument("bad " + what + " '" + s + "'");
    return v;
}

// image_ids become directory names in the result layout.
void check_id(const std::string& id) {
    if (id.empty() || id == "." || id == ".." || id.find_first_of("/\\") != std::string::npos) {
        throw InvalidArgument("image_id is not usable as a directory name: '" + id + "'");
    }
}

fs::path candidate_path(const fs::path& dir, std::size_t k) {
    return dir / ("cand_" + std::to_string(k) + ".png");
}

std::vector<double> read_scores(const fs::path& dir) {
    const fs::path p = dir / "scores.json";
    json j;
    try {
        j = json::parse(read_text_file(p));
    } catch (const json::parse_error& e) {
        throw ParseError(p.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("scores") || !j["scores"].is_array()) {
        throw ParseError(p.string() + ": expected {\"scores\": [...]}");
    }
    std::vector<double> scores;
    for (const auto& v : j["scores"]) {
        if (!v.is_number()) throw ParseError(p.string() + ": scores must be numbers");
        scores.push_back(v.get<double>());
    }
    return scores;
}

}  // namespace

PredictorSpec parse_predictor_spec(const std::string& text) {
    PredictorSpec spec;
    if (starts_with(text, "builtin:")) {
        spec.kind = PredictorKind::Builtin;
        const std::string rest = text.substr(8);
        if (rest == "oracle") {
            spec.builtin = {BuiltinKind::Oracle, 0, 0};
        } else if (starts_with(rest, "degraded:")) {
            const int r = parse_int(rest.substr(9), "degradation radius");
            if (r < 0) throw InvalidArgument("degradation radius must be >= 0");
            spec.builtin = {BuiltinKind::Degraded, r, 0};
        } else if (starts_with(rest, "constant:")) {
            const int v = parse_int(rest.substr(9), "constant value");
            if (v != 0 && v != 1) throw InvalidArgument("constant predictor value must be 0 or 1");
            spec.builtin = {BuiltinKind::Constant, 0, v};
        } else {
            throw InvalidArgument("unknown builtin predictor '" + rest + "'");
        }
    } else if (starts_with(text, "dir:")) {
        spec.kind = PredictorKind::Directory;
        spec.directory = text.substr(4);
        if (spec.directory.empty()) throw InvalidArgument("dir: predictor needs a path");
    } else if (starts_with(text, "cmd:")) {
        spec.kind = PredictorKind::Subprocess;
        spec.command = text.substr(4);
        if (spec.command.empty()) throw InvalidArgument("cmd: predictor needs a command");
    } else {
        throw InvalidArgument("predictor must be builtin:<name>, dir:<path> or cmd:<command>, got '" +
                              text + "'");
    }
    return spec;
}

std::string to_string(const PredictorSpec& spec) {
    switch (spec.kind) {
        case PredictorKind::Directory: return "dir:" + spec.directory.string();
        case PredictorKind::Subprocess: return "cmd:" + spec.command;
        case PredictorKind::Builtin:
            switch (spec.builtin.kind) {
                case BuiltinKind::Oracle: return "builtin:oracle";
                case BuiltinKind::Degraded:
                    return "builtin:degraded:" + std::to_string(spec.builtin.radius);
                case BuiltinKind::Constant:
                    return "builtin:constant:" + std::to_string(spec.builtin.value);
            }
    }
    return "?";
}

ordered_json to_json(const TaskRecord& t) {
    ordered_json j;
    j["image_id"] = t.image_id;
    j["image_path"] = t.image_path;
    if (t.prompt) j["prompt"] = to_json(*t.prompt);
    return j;
}

TaskRecord task_from_json(const json& j) {
    try {
        TaskRecord t;
        t.image_id = j.at("image_id").get<std::string>();
        t.image_path = j.at("image_path").get<std::string>();
        if (j.contains("prompt") && !j["prompt"].is_null()) t.prompt = prompt_from_json(j["prompt"]);
        return t;
    } catch (const json::exception& e) {
        throw ParseError(std::string("malformed task record: ") + e.what());
    }
}

fs::path write_task_manifest(std::vector<TaskRecord> tasks, const fs::path& out) {
    if (tasks.empty()) throw InvalidArgument("no tasks to write");
    std::sort(tasks.begin(), tasks.end(),
              [](const auto& a, const auto& b) { return a.image_id < b.image_id; });
    std::string text;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        check_id(tasks[i].image_id);
        if (i > 0 && tasks[i].image_id == tasks[i - 1].image_id) {
            throw InvalidArgument("duplicate task for " + tasks[i].image_id);
        }
        text += to_json(tasks[i]).dump();
        text += '\n';
    }
    write_text_file(out, text);
    return out;
}

std::vector<TaskRecord> read_task_manifest(const fs::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<TaskRecord> tasks;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            tasks.push_back(task_from_json(json::parse(line)));
        } catch (const json::parse_error& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        check_id(tasks.back().image_id);
    }
    return tasks;
}

void write_predictions(const fs::path& out_dir, const std::vector<PredictionCandidateSet>& sets) {
    for (const auto& set : sets) {
        check_id(set.image_id);
        const fs::path dir = out_dir / set.image_id;
        fs::create_directories(dir);
        ordered_json scores = ordered_json::array();
        for (std::size_t k = 0; k < set.candidates.size(); ++k) {
            scores.push_back(set.candidates[k].score);
            write_mask(candidate_path(dir, k), set.candidates[k].mask);
        }
        write_text_file(dir / "scores.json", ordered_json{{"scores", scores}}.dump() + "\n");
    }
}

PredictionCandidateSet read_prediction(const fs::path& out_dir, const std::string& image_id) {
    check_id(image_id);
    const fs::path dir = out_dir / image_id;
    if (!fs::is_directory(dir)) throw IoError("no predictor output for " + image_id);
    const std::vector<double> scores = read_scores(dir);
    if (scores.empty()) throw ParseError("no candidates for " + image_id);

    PredictionCandidateSet set;
    set.image_id = image_id;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        if (!std::isfinite(scores[k])) throw ParseError("non-finite score for " + image_id);
        BinaryMask m = read_mask(candidate_path(dir, k));
        if (!set.candidates.empty() && (m.width() != set.candidates[0].mask.width() ||
                                        m.height() != set.candidates[0].mask.height())) {
            throw DimensionMismatch("candidate masks of " + image_id + " differ in size");
        }
        set.candidates.push_back({std::move(m), scores[k]});
    }
    return set;
}

std::size_t best_candidate_index(const PredictionCandidateSet& set) {
    if (set.candidates.empty()) throw InvalidArgument("no candidates for " + set.image_id);
    std::size_t best = 0;
    for (std::size_t k = 1; k < set.candidates.size(); ++k) {
        if (set.candidates[k].score > set.candidates[best].score) best = k;
    }
    return best;
}

BinaryMask select_best_mask(const PredictionCandidateSet& set) {
    return set.candidates[best_candidate_index(set)].mask;
}

PredictionCandidateSet builtin_predictor(const BuiltinPredictor& which, const Sample& sample) {
    PredictionCandidateSet set;
    set.image_id = sample.image_id;
    const BinaryMask& gt = sample.mask;
    auto constant = [&](int v) {
        return Candidate{BinaryMask(gt.width(), gt.height(), static_cast<std::uint8_t>(v)), 0.5};
    };
    switch (which.kind) {
        case BuiltinKind::Oracle:
            set.candidates.push_back({gt, 1.0});
            break;
        case BuiltinKind::Degraded: {
            // Empty candidates are dropped; only an empty ground truth empties both.
            BinaryMask dilated = dilate4(gt, which.radius);
            if (!dilated.empty_foreground()) set.candidates.push_back({std::move(dilated), 0.6});
            BinaryMask eroded = erode4(gt, which.radius);
            if (!eroded.empty_foreground()) set.candidates.push_back({std::move(eroded), 0.4});
            break;
        }
        case BuiltinKind::Constant:
            set.candidates.push_back(constant(which.value));
            break;
    }
    if (set.candidates.empty()) {
        set.candidates.push_back(constant(0));
        set.degenerate = true;
    }
    return set;
}

CollectResult collect_predictions(const PredictorSpec& spec, const fs::path& tasks_path,
                                  const fs::path& out_dir, const DatasetManifest* manifest,
                                  unsigned jobs) {
    const std::vector<TaskRecord> tasks = read_task_manifest(tasks_path);
    CollectResult result;

    fs::path read_from = out_dir;
    if (spec.kind == PredictorKind::Builtin && !manifest) {
        throw InvalidArgument("builtin predictors need the dataset manifest");
    }
    if (spec.kind == PredictorKind::Directory) read_from = spec.directory;
    if (spec.kind == PredictorKind::Subprocess) {
        fs::create_directories(out_dir);
        const std::string cmd = spec.command + " --tasks " + shell_quote(tasks_path.string()) +
                                " --out " + shell_quote(out_dir.string());
        ProcessResult pr = run_process({"/bin/sh", "-c", cmd}, spec.timeout);
        result.predictor_output = pr.output;
        if (pr.timed_out) {
            throw PredictorFailure("predictor timed out after " +
                                       std::to_string(spec.timeout.count()) + " s",
                                   pr.output);
        }
        if (pr.exit_code != 0) {
            throw PredictorFailure("predictor exited with status " + std::to_string(pr.exit_code),
                                   pr.output);
        }
    }

    std::vector<std::optional<PredictionCandidateSet>> sets(tasks.size());
    std::vector<std::string> errors(tasks.size());
    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const TaskRecord& t = tasks[i];
        try {
            if (spec.kind == PredictorKind::Builtin) {
                const ManifestEntry* e = manifest->find(t.image_id);
                if (!e) throw InvalidArgument("task " + t.image_id + " is not in the manifest");
                sets[i] = builtin_predictor(spec.builtin, load_sample(*manifest, *e));
            } else {
                sets[i] = read_prediction(read_from, t.image_id);
            }
        } catch (const Error& err) {
            errors[i] = err.what();
        }
    });
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (sets[i]) result.predictions.emplace(tasks[i].image_id, std::move(*sets[i]));
        else result.errors.emplace(tasks[i].image_id, errors[i]);
    }
    return result;
}

std::vector<std::string> validate_result_layout(const fs::path& tasks_path, const fs::path& out_dir) {
    std::vector<std::string> problems;
    std::vector<TaskRecord> tasks;
    try {
        tasks = read_task_manifest(tasks_path);
    } catch (const Error& e) {
        problems.push_back(e.what());
        return problems;
    }
    for (const auto& t : tasks) {
        const fs::path dir = out_dir / t.image_id;
        if (!fs::is_directory(dir)) {
            problems.push_back(t.image_id + ": missing result directory");
            continue;
        }
        std::vector<double> scores;
        try {
            scores = read_scores(dir);
        } catch (const Error& e) {
            problems.push_back(t.image_id + ": " + e.what());
            continue;
        }
        if (scores.empty()) problems.push_back(t.image_id + ": no candidates");
        std::optional<ImageSize> size;
        for (std::size_t k = 0; k < scores.size(); ++k) {
            const std::string tag = t.image_id + ": cand_" + std::to_string(k);
            if (!std::isfinite(scores[k]) || scores[k] < 0.0 || scores[k] > 1.0) {
                problems.push_back(tag + ": score outside [0, 1]");
            }
            const fs::path png = candidate_path(dir, k);
            if (!fs::is_regular_file(png)) {
                problems.push_back(tag + ".png missing");
                continue;
            }
            try {
                const Image8 img = read_image(png);
                if (img.channels != 1) problems.push_back(tag + ".png is not single-channel");
                if (std::any_of(img.pixels.begin(), img.pixels.end(),
                                [](std::uint8_t v) { return v != 0 && v != 255; })) {
                    problems.push_back(tag + ".png has values other than 0 and 255");
                }
                const ImageSize s{img.width, img.height};
                if (size && !(*size == s)) problems.push_back(tag + ".png size differs from cand_0");
                if (!size) size = s;
            } catch (const Error& e) {
                problems.push_back(tag + ": " + e.what());
            }
        }
        if (fs::is_regular_file(candidate_path(dir, scores.size()))) {
            problems.push_back(t.image_id + ": more candidate files than scores");
        }
    }
    return problems;
}

}  // namespace promptseg
