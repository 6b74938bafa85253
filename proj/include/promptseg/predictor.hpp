#pragma once
// File-based protocol between the harness and an external promptable
// predictor.
//
//   tasks.jsonl, one record per line, sorted by image_id:
//     {"image_id": str, "image_path": str,
//      "prompt": {"point": [x, y], "point_label": 1, "box": [x0, y0, x1, y1]}}
//     `prompt` is omitted in the no-prompt arm.
//
//   results, per task:
//     <out>/<image_id>/scores.json   {"scores": [s0, s1, ...]}
//     <out>/<image_id>/cand_<k>.png  8-bit grayscale, 0 background, 255 foreground
//
//   subprocess: `<command> --tasks <file> --out <dir>`, exit 0 on success.
//
// The final mask is the highest-scoring candidate; ties go to the lowest index.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "promptseg/dataset.hpp"
#include "promptseg/mask.hpp"
#include "promptseg/prompts.hpp"

namespace promptseg {

struct TaskRecord {
    std::string image_id;
    std::string image_path;
    std::optional<Prompt> prompt;
    bool operator==(const TaskRecord&) const = default;
};

struct Candidate {
    BinaryMask mask;
    double score = 0.0;
    bool operator==(const Candidate&) const = default;
};

struct PredictionCandidateSet {
    std::string image_id;
    std::vector<Candidate> candidates;
    bool degenerate = false;
    bool operator==(const PredictionCandidateSet&) const = default;
};

enum class BuiltinKind { Oracle, Degraded, Constant };

struct BuiltinPredictor {
    BuiltinKind kind = BuiltinKind::Oracle;
    int radius = 0;  // Degraded
    int value = 0;   // Constant, 0 or 1
};

enum class PredictorKind { Subprocess, Directory, Builtin };

struct PredictorSpec {
    PredictorKind kind = PredictorKind::Builtin;
    std::string command;                // Subprocess
    std::filesystem::path directory;    // Directory
    BuiltinPredictor builtin;           // Builtin
    std::chrono::seconds timeout{0};    // Subprocess; 0 = none
};

// Accepted forms:
//   builtin:oracle | builtin:degraded:<r> | builtin:constant:<0|1>
//   dir:<path>
//   cmd:<shell command>
PredictorSpec parse_predictor_spec(const std::string& text);
std::string to_string(const PredictorSpec& spec);

nlohmann::ordered_json to_json(const TaskRecord& t);
TaskRecord task_from_json(const nlohmann::json& j);

// Sorts by image_id. Throws InvalidArgument on an empty list, IoError when unwritable.
std::filesystem::path write_task_manifest(std::vector<TaskRecord> tasks,
                                          const std::filesystem::path& out);
std::vector<TaskRecord> read_task_manifest(const std::filesystem::path& path);

// Writes the result layout for each set.
void write_predictions(const std::filesystem::path& out_dir,
                       const std::vector<PredictionCandidateSet>& sets);

// Reads one task's results. Throws IoError / ParseError.
PredictionCandidateSet read_prediction(const std::filesystem::path& out_dir,
                                       const std::string& image_id);

// Best candidate index. Throws InvalidArgument when there are none.
std::size_t best_candidate_index(const PredictionCandidateSet& set);
BinaryMask select_best_mask(const PredictionCandidateSet& set);

// oracle       -> GT, score 1.0
// degraded(r)  -> GT dilated r times (0.6), GT eroded r times (0.4); empty ones dropped
// constant(v)  -> uniform v, score 0.5
// If every candidate is dropped the set falls back to constant(0), flagged degenerate.
PredictionCandidateSet builtin_predictor(const BuiltinPredictor& which, const Sample& sample);

struct CollectResult {
    std::map<std::string, PredictionCandidateSet> predictions;
    std::map<std::string, std::string> errors;  // image_id -> reason
    std::string predictor_output;               // captured subprocess output
};

// Builtin predictors need `manifest` to reach the ground truth; the other
// kinds ignore it. Subprocess output goes under `out_dir`. Throws
// PredictorFailure on nonzero exit or timeout.
CollectResult collect_predictions(const PredictorSpec& spec,
                                  const std::filesystem::path& tasks_path,
                                  const std::filesystem::path& out_dir,
                                  const DatasetManifest* manifest = nullptr, unsigned jobs = 0);

// Conformance check of a result directory against a task file. Returns one
// message per problem; empty means conformant.
std::vector<std::string> validate_result_layout(const std::filesystem::path& tasks_path,
                                                const std::filesystem::path& out_dir);

}  // namespace promptseg
