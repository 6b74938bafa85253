#pragma once
// Subcommand bodies. Each returns the process exit code:
// 0 success, 1 validation or run failure. Usage errors (2) are raised by the
// argument parser before these run.
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "promptseg/prompts.hpp"

namespace promptseg::cli {

struct IngestOptions {
    std::filesystem::path root;
    std::filesystem::path metadata;
    std::filesystem::path out = "manifest.json";
    std::filesystem::path report;  // default: <out dir>/validation_report.json
    unsigned jobs = 0;
};
int run_ingest(const IngestOptions& o);

struct SplitOptions {
    std::filesystem::path manifest;
    double fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = false;
    std::filesystem::path out = "split.json";
};
int run_split(const SplitOptions& o);

struct GenPromptsOptions {
    std::filesystem::path manifest;
    std::filesystem::path split;  // optional
    std::string subset = "all";
    std::uint64_t seed = 0;
    PerturbationConfig perturbation;
    bool no_perturb = false;
    std::filesystem::path out = "prompts.jsonl";
    unsigned jobs = 0;
};
int run_gen_prompts(const GenPromptsOptions& o);

struct EvalOptions {
    std::filesystem::path manifest;
    std::filesystem::path split;  // optional
    std::string subset;           // default: val with a split, all without
    std::filesystem::path prompts;
    bool no_prompt = false;
    std::string predictor;
    int predictor_timeout = 0;  // seconds, 0 = none
    std::filesystem::path out;
    unsigned jobs = 0;
    std::string resolved_config;  // written verbatim to <out>/run_config.toml
};
int run_eval(const EvalOptions& o);

struct ReportOptions {
    std::filesystem::path records;
    std::filesystem::path out;  // default: <records dir>/report
    std::string label;          // default: records file stem's parent name
    bool by_class = false;
    bool table_order = false;
    int hist_bins = 20;
};
int run_report(const ReportOptions& o);

struct CompareOptions {
    std::filesystem::path baseline;
    std::filesystem::path candidate;
    std::filesystem::path out;  // optional comparison.json
};
int run_compare(const CompareOptions& o);

struct LossCheckOptions {
    int instances = 100;
    int max_size = 12;
    std::uint64_t seed = 0;
    double step = 1e-6;
    double tolerance = 1e-4;
};
int run_losscheck(const LossCheckOptions& o);

struct MockPredictOptions {
    std::filesystem::path manifest;
    std::string builtin = "oracle";
    std::filesystem::path tasks;
    std::filesystem::path out;
    unsigned jobs = 0;
};
int run_mock_predict(const MockPredictOptions& o);

struct ValidateResultsOptions {
    std::filesystem::path tasks;
    std::filesystem::path out;
};
int run_validate_results(const ValidateResultsOptions& o);

}  // namespace promptseg::cli
