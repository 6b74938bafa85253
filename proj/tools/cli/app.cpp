#include "cli/app.hpp"

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/commands.hpp"
#include "promptseg/logging.hpp"
#include "promptseg/version.hpp"

namespace promptseg::cli {

namespace {

constexpr int kUsageError = 2;

std::string open_unit_interval(const std::string& text) {
    try {
        const double v = std::stod(text);
        if (v > 0.0 && v < 1.0) return {};
    } catch (const std::exception&) {
    }
    return "must lie strictly between 0 and 1";
}

// Keys of one subcommand from the CLI11 TOML dump, so the file can be fed
// back through --config. Unset strings and false flags are left out: they
// re-resolve to the same defaults, and CLI11 would count them as given for
// validators and exclusions.
std::string subcommand_config(const CLI::App& app, const std::string& name) {
    std::istringstream in(app.config_to_str(true, false));
    std::string line, out;
    const std::string prefix = name + ".";
    while (std::getline(in, line)) {
        const auto ends_with = [&](std::string_view tail) {
            return line.size() >= tail.size() &&
                   line.compare(line.size() - tail.size(), tail.size(), tail) == 0;
        };
        const bool unset = ends_with("=\"\"") || ends_with("=false");
        if (line.rfind(prefix, 0) == 0 && !unset) out += line + "\n";
    }
    return out;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app("Prompt simulation and evaluation harness for promptable lesion segmentation",
                 "promptseg");
    app.option_defaults()->always_capture_default();
    app.set_version_flag("--version", build_id());
    app.set_config("--config", "", "TOML config file; command-line flags take precedence");
    app.require_subcommand(1);
    bool quiet = false;
    app.add_flag("--quiet", quiet, "Suppress JSON log lines on stderr");

    IngestOptions ingest;
    auto* c_ingest = app.add_subcommand("ingest", "Validate a dataset and write its manifest");
    c_ingest->add_option("--root", ingest.root, "Dataset root (images/, masks/)")->required();
    c_ingest->add_option("--metadata", ingest.metadata, "Metadata CSV with image_id,dx")->required();
    c_ingest->add_option("--out", ingest.out, "Manifest JSON to write");
    c_ingest->add_option("--report", ingest.report, "Validation report JSON (default: next to the manifest)");
    c_ingest->add_option("--jobs", ingest.jobs, "Worker threads, 0 = all cores");

    SplitOptions split;
    auto* c_split = app.add_subcommand("split", "Seeded train/validation split");
    c_split->add_option("--manifest", split.manifest)->required();
    c_split->add_option("--fraction", split.fraction, "Training fraction")->check(open_unit_interval);
    c_split->add_option("--seed", split.seed);
    c_split->add_flag("--stratified", split.stratified, "Stratify by lesion class");
    c_split->add_option("--out", split.out);

    GenPromptsOptions gen;
    auto* c_gen = app.add_subcommand("gen-prompts", "Simulate one point and one box prompt per image");
    c_gen->add_option("--manifest", gen.manifest)->required();
    c_gen->add_option("--split", gen.split, "Split JSON (optional)");
    c_gen->add_option("--subset", gen.subset)->check(CLI::IsMember({"train", "val", "all"}));
    c_gen->add_option("--seed", gen.seed);
    c_gen->add_option("--margin", gen.perturbation.margin_px, "Pixels added on each side")
        ->check(CLI::NonNegativeNumber);
    c_gen->add_option("--max-shift", gen.perturbation.max_shift_px, "Maximum shift per axis in pixels")
        ->check(CLI::NonNegativeNumber);
    c_gen->add_option("--max-scale", gen.perturbation.max_scale_frac, "Maximum relative scale change")
        ->check(CLI::Range(0.0, 0.999999));
    c_gen->add_flag("--scale-one-sided", gen.perturbation.scale_one_sided,
                    "Scale factor in [1, 1 + max-scale] instead of symmetric");
    c_gen->add_flag("--no-perturb", gen.no_perturb, "Margin-expanded tight boxes, no shift or scale");
    c_gen->add_option("--out", gen.out);
    c_gen->add_option("--jobs", gen.jobs);

    EvalOptions eval;
    auto* c_eval = app.add_subcommand("eval", "Run a predictor over the selected samples and score it");
    c_eval->add_option("--manifest", eval.manifest)->required();
    c_eval->add_option("--split", eval.split);
    c_eval->add_option("--subset", eval.subset, "train, val or all (default: val with --split)")
        ->check(CLI::IsMember({"train", "val", "all"}));
    auto* o_prompts = c_eval->add_option("--prompts", eval.prompts, "Prompts JSONL");
    auto* o_noprompt = c_eval->add_flag("--no-prompt", eval.no_prompt, "Promptless arm");
    o_prompts->excludes(o_noprompt);
    c_eval->add_option("--predictor", eval.predictor,
                       "builtin:oracle | builtin:degraded:<r> | builtin:constant:<v> | dir:<path> | cmd:<command>")
        ->required();
    c_eval->add_option("--predictor-timeout", eval.predictor_timeout, "Seconds, 0 = no limit")
        ->check(CLI::NonNegativeNumber);
    c_eval->add_option("--out", eval.out, "Run directory")->required();
    c_eval->add_option("--jobs", eval.jobs, "Worker threads, 0 = all cores");

    ReportOptions report;
    auto* c_report = app.add_subcommand("report", "Summaries, per-class table and histograms");
    c_report->add_option("--records", report.records)->required();
    c_report->add_option("--out", report.out, "Output directory (default: <records dir>/report)");
    c_report->add_option("--label", report.label);
    c_report->add_flag("--by-class", report.by_class, "Print the per-class mean(variance) table");
    c_report->add_flag("--table-order", report.table_order, "Use the reference table's class order (MEL, VASC, NV, BKL, BCC, AKIEC, DF)");
    c_report->add_option("--hist-bins", report.hist_bins)->check(CLI::PositiveNumber);

    CompareOptions cmp;
    auto* c_cmp = app.add_subcommand("compare", "Percentage improvement between two summaries");
    c_cmp->add_option("--baseline", cmp.baseline)->required();
    c_cmp->add_option("--new", cmp.candidate)->required();
    c_cmp->add_option("--out", cmp.out, "comparison.json to write");

    LossCheckOptions loss;
    auto* c_loss = app.add_subcommand("losscheck", "Finite-difference check of the Dice+CE gradient");
    c_loss->add_option("--instances", loss.instances)->check(CLI::PositiveNumber);
    c_loss->add_option("--max-size", loss.max_size)->check(CLI::PositiveNumber);
    c_loss->add_option("--seed", loss.seed);
    c_loss->add_option("--step", loss.step)->check(CLI::PositiveNumber);
    c_loss->add_option("--tolerance", loss.tolerance)->check(CLI::PositiveNumber);

    MockPredictOptions mock;
    auto* c_mock = app.add_subcommand("mock-predict",
                                      "Protocol-conformant predictor backed by a builtin test double");
    c_mock->add_option("--manifest", mock.manifest)->required();
    c_mock->add_option("--builtin", mock.builtin, "oracle | degraded:<r> | constant:<v>");
    c_mock->add_option("--tasks", mock.tasks)->required();
    c_mock->add_option("--out", mock.out)->required();
    c_mock->add_option("--jobs", mock.jobs);

    ValidateResultsOptions vr;
    auto* c_vr = app.add_subcommand("validate-results", "Check a result directory against a task file");
    c_vr->add_option("--tasks", vr.tasks)->required();
    c_vr->add_option("--out", vr.out)->required();

    try {
        app.parse(argc, argv);
        if (c_eval->parsed() && eval.prompts.empty() && !eval.no_prompt) {
            throw CLI::ValidationError("eval", "one of --prompts or --no-prompt is required");
        }
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }
    log::set_enabled(!quiet);

    if (c_ingest->parsed()) return run_ingest(ingest);
    if (c_split->parsed()) return run_split(split);
    if (c_gen->parsed()) return run_gen_prompts(gen);
    if (c_eval->parsed()) {
        eval.resolved_config = subcommand_config(app, "eval");
        return run_eval(eval);
    }
    if (c_report->parsed()) return run_report(report);
    if (c_cmp->parsed()) return run_compare(cmp);
    if (c_loss->parsed()) return run_losscheck(loss);
    if (c_mock->parsed()) return run_mock_predict(mock);
    if (c_vr->parsed()) return run_validate_results(vr);
    return kUsageError;
}

}  // namespace promptseg::cli
