#include "cli/commands.hpp"

#include <cstdio>
#include <iostream>
#include <map>
#include <mutex>

#include "promptseg/dataset.hpp"
#include "promptseg/error.hpp"
#include "promptseg/logging.hpp"
#include "promptseg/losses.hpp"
#include "promptseg/metrics.hpp"
#include "promptseg/parallel.hpp"
#include "promptseg/predictor.hpp"
#include "promptseg/records_io.hpp"
#include "promptseg/reporting.hpp"
#include "promptseg/version.hpp"

namespace promptseg::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

int fail(std::string_view event, const std::string& message) {
    log::error(event, {{"message", message}});
    std::cout << "error: " << message << "\n";
    return 1;
}

}  // namespace

int run_ingest(const IngestOptions& o) {
    ManifestLoad load;
    try {
        load = load_manifest(o.root, o.metadata, o.jobs);
    } catch (const Error& e) {
        return fail("ingest_failed", e.what());
    }
    const fs::path report_path =
        o.report.empty() ? o.out.parent_path() / "validation_report.json" : o.report;
    try {
        write_manifest(o.out, load.manifest);
        write_text_file(report_path, to_json(load.report).dump(2) + "\n");
    } catch (const Error& e) {
        return fail("ingest_failed", e.what());
    }

    std::size_t warnings = 0;
    for (const auto& issue : load.report.issues) {
        const bool err = issue.severity == Severity::Error;
        if (!err) ++warnings;
        std::cout << (err ? "error" : "warning") << " " << issue.image_id << ": " << issue.message
                  << "\n";
        if (err) log::error("validation", {{"image_id", issue.image_id}, {"message", issue.message}});
        else log::warn("validation", {{"image_id", issue.image_id}, {"message", issue.message}});
    }
    std::cout << "ingested " << load.manifest.entries.size() << " entries, "
              << load.report.error_count() << " errors, " << warnings << " warnings -> "
              << o.out.string() << "\n";
    log::info("ingest_done", {{"entries", load.manifest.entries.size()},
                              {"errors", load.report.error_count()},
                              {"manifest", o.out.string()},
                              {"report", report_path.string()}});
    return load.report.has_errors() ? 1 : 0;
}

int run_split(const SplitOptions& o) {
    try {
        const DatasetManifest m = read_manifest(o.manifest);
        const SplitSpec s = split_dataset(m, o.fraction, o.seed, o.stratified);
        write_split(o.out, s);
        for (const auto& w : s.warnings) log::warn("split", {{"message", w}});
        std::cout << "split " << m.entries.size() << " ids: " << s.train_ids.size() << " train, "
                  << s.val_ids.size() << " val (seed " << s.seed << ") -> " << o.out.string()
                  << "\n";
        return 0;
    } catch (const Error& e) {
        return fail("split_failed", e.what());
    }
}

int run_gen_prompts(const GenPromptsOptions& o) {
    try {
        const DatasetManifest m = read_manifest(o.manifest);
        std::optional<SplitSpec> split;
        if (!o.split.empty()) split = read_split(o.split);
        const auto entries = select_entries(m, split, parse_subset(o.subset));

        PerturbationConfig cfg = o.perturbation;
        if (o.no_perturb) cfg = PerturbationConfig::margin_only(cfg.margin_px);
        cfg.validate();

        std::vector<std::optional<PromptSet>> out(entries.size());
        std::vector<std::string> errors(entries.size());
        parallel_for(entries.size(), o.jobs, [&](std::size_t i) {
            try {
                const Sample s = load_sample(m, entries[i]);
                PromptSet p = generate_prompts(s, cfg, o.seed);
                // Validator pass over the generated record.
                const std::string bad = check_prompt(p.prompt, s.mask);
                if (!bad.empty()) throw Error(entries[i].image_id + ": " + bad);
                out[i] = std::move(p);
            } catch (const Error& e) {
                errors[i] = e.what();
            }
        });

        std::vector<PromptSet> prompts;
        std::size_t failed = 0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (out[i]) {
                prompts.push_back(std::move(*out[i]));
            } else {
                ++failed;
                log::error("prompt_rejected", {{"image_id", entries[i].image_id}, {"message", errors[i]}});
                std::cout << "error " << entries[i].image_id << ": " << errors[i] << "\n";
            }
        }
        write_prompts(o.out, prompts);
        std::cout << "wrote " << prompts.size() << " prompt sets (" << failed << " rejected) -> "
                  << o.out.string() << "\n";
        return failed ? 1 : 0;
    } catch (const Error& e) {
        return fail("gen_prompts_failed", e.what());
    }
}

int run_eval(const EvalOptions& o) {
    std::vector<ordered_json> run_log;
    std::mutex log_mu;
    auto note = [&](std::string_view level, std::string_view event, ordered_json fields) {
        ordered_json line = {{"level", level}, {"event", event}};
        for (auto& [k, v] : fields.items()) line[k] = v;
        {
            std::lock_guard lock(log_mu);
            run_log.push_back(line);
        }
        log::emit(level, event, std::move(fields));
    };
    auto flush_log = [&] {
        std::string text;
        for (const auto& l : run_log) text += l.dump() + "\n";
        write_text_file(o.out / "run_log.jsonl", text);
    };

    try {
        fs::create_directories(o.out);
        write_text_file(o.out / "run_config.toml",
                        "# resolved configuration, " + build_id() + "\n" + o.resolved_config);

        const PredictorSpec spec = [&] {
            PredictorSpec s = parse_predictor_spec(o.predictor);
            s.timeout = std::chrono::seconds(o.predictor_timeout);
            return s;
        }();
        const DatasetManifest m = read_manifest(o.manifest);
        std::optional<SplitSpec> split;
        if (!o.split.empty()) split = read_split(o.split);
        const std::string subset = !o.subset.empty() ? o.subset : (split ? "val" : "all");
        const auto entries = select_entries(m, split, parse_subset(subset));
        if (entries.empty()) return fail("eval_failed", "no samples selected");
        note("info", "eval_start", {{"generator", build_id()},
                                    {"samples", entries.size()},
                                    {"subset", subset},
                                    {"predictor", to_string(spec)},
                                    {"arm", o.no_prompt ? "no-prompt" : "prompt"}});

        std::map<std::string, Prompt> prompts;
        if (!o.no_prompt) {
            for (auto& p : read_prompts(o.prompts)) prompts[p.image_id] = p.prompt;
        }

        std::vector<TaskRecord> tasks;
        std::map<std::string, std::string> failures;
        for (const auto& e : entries) {
            TaskRecord t{e.image_id, fs::absolute(m.source_root / e.image_path).lexically_normal().string(),
                         std::nullopt};
            if (!o.no_prompt) {
                auto it = prompts.find(e.image_id);
                if (it == prompts.end()) {
                    failures[e.image_id] = "no prompt for this image";
                    continue;
                }
                if (it->second.point.x >= e.width || it->second.point.y >= e.height ||
                    !it->second.box.within(e.width, e.height) || it->second.point.x < 0 ||
                    it->second.point.y < 0) {
                    failures[e.image_id] = "prompt does not fit the image dimensions";
                    continue;
                }
                t.prompt = it->second;
            }
            tasks.push_back(std::move(t));
        }

        std::vector<MetricRecord> records;
        if (!tasks.empty()) {
            const fs::path tasks_path = write_task_manifest(tasks, o.out / "tasks.jsonl");
            CollectResult collected;
            try {
                collected = collect_predictions(spec, tasks_path, o.out / "predictions", &m, o.jobs);
            } catch (const PredictorFailure& e) {
                write_text_file(o.out / "predictor.log", e.captured_output());
                note("error", "predictor_failed", {{"message", e.what()}, {"output", e.captured_output()}});
                flush_log();
                std::cout << "error: " << e.what() << "\n" << e.captured_output();
                return 1;
            }
            if (spec.kind == PredictorKind::Subprocess) {
                write_text_file(o.out / "predictor.log", collected.predictor_output);
            }
            for (auto& [id, why] : collected.errors) failures[id] = why;

            std::vector<std::optional<MetricRecord>> slots(tasks.size());
            std::vector<std::string> slot_errors(tasks.size());
            parallel_for(tasks.size(), o.jobs, [&](std::size_t i) {
                const TaskRecord& t = tasks[i];
                auto it = collected.predictions.find(t.image_id);
                if (it == collected.predictions.end()) return;
                try {
                    const Sample s = load_sample(m, *m.find(t.image_id));
                    if (t.prompt) {
                        const std::string bad = check_prompt(*t.prompt, s.mask);
                        if (!bad.empty()) throw Error("invalid prompt: " + bad);
                    }
                    const BinaryMask best = select_best_mask(it->second);
                    MetricRecord r = evaluate_pair(best, s.mask, s.image_id, s.lesion_class);
                    r.degenerate = r.degenerate || it->second.degenerate;
                    slots[i] = std::move(r);
                } catch (const Error& e) {
                    slot_errors[i] = e.what();
                }
            });
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                if (slots[i]) {
                    if (slots[i]->degenerate) {
                        note("warn", "degenerate_record", {{"image_id", slots[i]->image_id}});
                    }
                    records.push_back(std::move(*slots[i]));
                } else if (!slot_errors[i].empty()) {
                    failures[tasks[i].image_id] = slot_errors[i];
                }
            }
        }

        write_records(o.out / "records.csv", records);
        for (const auto& [id, why] : failures) {
            note("error", "sample_failed", {{"image_id", id}, {"message", why}});
            std::cout << "error " << id << ": " << why << "\n";
        }

        if (!records.empty()) {
            const RunSummary s = summarize(records, to_string(spec));
            std::printf("evaluated %zu of %zu samples: mean dice %.4f, mean iou %.4f, mean pixel accuracy %.4f\n",
                        records.size(), entries.size(), s.mean_dice, s.mean_iou, s.mean_accuracy);
        }
        note("info", "eval_done", {{"records", records.size()}, {"failures", failures.size()}});
        flush_log();
        return failures.empty() ? 0 : 1;
    } catch (const Error& e) {
        note("error", "eval_failed", {{"message", e.what()}});
        try {
            flush_log();
        } catch (const Error&) {
        }
        std::cout << "error: " << e.what() << "\n";
        return 1;
    }
}

int run_report(const ReportOptions& o) {
    try {
        const auto records = read_records(o.records);
        if (records.empty()) return fail("report_failed", "no records in " + o.records.string());
        const fs::path out = !o.out.empty() ? o.out : o.records.parent_path() / "report";
        const std::string label = !o.label.empty() ? o.label : o.records.parent_path().filename().string();

        const RunSummary s = summarize(records, label);
        std::vector<Histogram> hists;
        for (Metric m : kAllMetrics) hists.push_back(histogram(records, m, o.hist_bins));
        const ReportPaths paths = emit_reports(s, hists, nullptr, out, o.table_order);

        std::printf("%s: %zu samples, mean pixel accuracy %.4f, mean dice %.4f, mean iou %.4f\n",
                    label.c_str(), s.n_samples, s.mean_accuracy, s.mean_dice, s.mean_iou);
        if (o.by_class) std::cout << per_class_table(s, o.table_order);
        log::info("report_done", {{"summary", paths.summary.string()}, {"per_class", paths.per_class.string()}});
        return 0;
    } catch (const Error& e) {
        return fail("report_failed", e.what());
    }
}

int run_compare(const CompareOptions& o) {
    try {
        const RunSummary base = read_summary(o.baseline);
        const RunSummary cand = read_summary(o.candidate);
        const ComparisonReport r = compare(base, cand);
        std::cout << comparison_table(r);
        if (!o.out.empty()) write_text_file(o.out, to_json(r).dump(2) + "\n");
        bool ok = true;
        for (const auto& c : r.metrics) {
            if (!c.pct_improvement) {
                ok = false;
                log::error("compare", {{"metric", to_string(c.metric)}, {"message", c.error}});
            }
        }
        return ok ? 0 : 1;
    } catch (const Error& e) {
        return fail("compare_failed", e.what());
    }
}

int run_losscheck(const LossCheckOptions& o) {
    GradientCheckOptions g;
    g.instances = o.instances;
    g.max_side = o.max_size;
    g.seed = o.seed;
    g.step = o.step;
    g.tolerance = o.tolerance;
    const GradientCheckResult r = run_gradient_check(g);
    std::printf("gradient check: %d instances up to %dx%d, max relative error %.3e (tolerance %.1e): %s\n",
                r.instances, o.max_size, o.max_size, r.max_relative_error, o.tolerance,
                r.passed ? "ok" : "FAILED");
    log::info("losscheck", {{"instances", r.instances},
                            {"max_relative_error", r.max_relative_error},
                            {"passed", r.passed}});
    return r.passed ? 0 : 1;
}

int run_mock_predict(const MockPredictOptions& o) {
    try {
        const BuiltinPredictor which = parse_predictor_spec("builtin:" + o.builtin).builtin;
        const DatasetManifest m = read_manifest(o.manifest);
        const auto tasks = read_task_manifest(o.tasks);
        std::vector<std::string> errors(tasks.size());
        parallel_for(tasks.size(), o.jobs, [&](std::size_t i) {
            try {
                const ManifestEntry* e = m.find(tasks[i].image_id);
                if (!e) throw Error("unknown image_id " + tasks[i].image_id);
                write_predictions(o.out, {builtin_predictor(which, load_sample(m, *e))});
            } catch (const Error& err) {
                errors[i] = err.what();
            }
        });
        int rc = 0;
        for (const auto& e : errors) {
            if (e.empty()) continue;
            std::cerr << e << "\n";
            rc = 1;
        }
        return rc;
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int run_validate_results(const ValidateResultsOptions& o) {
    const auto problems = validate_result_layout(o.tasks, o.out);
    for (const auto& p : problems) std::cout << "problem: " << p << "\n";
    std::cout << (problems.empty() ? "result layout conforms\n" : "result layout does not conform\n");
    return problems.empty() ? 0 : 1;
}

}  // namespace promptseg::cli
