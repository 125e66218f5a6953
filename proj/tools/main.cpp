// mathverify: evaluation harness for mathematical-reasoning benchmarks.
// Subcommands: validate, judge, baseline, report, metaeval.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "mathverify/baseline.hpp"
#include "mathverify/digest.hpp"
#include "mathverify/errors.hpp"
#include "mathverify/extract.hpp"
#include "mathverify/ingest.hpp"
#include "mathverify/metaeval.hpp"
#include "mathverify/metrics.hpp"
#include "mathverify/pipeline.hpp"
#include "mathverify/prompts.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mathverify;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTransport = 3;
constexpr int kExitDataJoin = 4;

struct BackendOpts {
    std::string endpoint;
    std::string model = "judge";
    std::string api_key_env = "MATHVERIFY_API_KEY";
    std::string replay_dir;
    std::string record_dir;
    int max_concurrency = 8;
};

void add_backend_opts(CLI::App* cmd, BackendOpts& opts) {
    cmd->add_option("--endpoint", opts.endpoint, "Chat-completions endpoint URL");
    cmd->add_option("--model", opts.model, "Judge model name");
    cmd->add_option("--api-key-env", opts.api_key_env,
                    "Environment variable holding the bearer token");
    cmd->add_option("--replay", opts.replay_dir, "Replay cache directory (no network)");
    cmd->add_option("--record", opts.record_dir, "Record live responses into this cache directory");
    cmd->add_option("--max-concurrency", opts.max_concurrency, "Maximum in-flight judge calls")
        ->check(CLI::PositiveNumber);
}

BackendConfig make_backend(const BackendOpts& opts) {
    BackendConfig cfg;
    cfg.api_key_env = opts.api_key_env;
    cfg.max_concurrency = opts.max_concurrency;
    if (!opts.replay_dir.empty()) {
        cfg.mode = BackendMode::Replay;
        cfg.cache_dir = opts.replay_dir;
    } else if (!opts.record_dir.empty()) {
        cfg.mode = BackendMode::LiveRecording;
        cfg.cache_dir = opts.record_dir;
        cfg.endpoint_url = opts.endpoint;
    } else {
        cfg.mode = BackendMode::Live;
        cfg.endpoint_url = opts.endpoint;
    }
    if (cfg.mode != BackendMode::Replay && cfg.endpoint_url.empty())
        throw ConfigError("--endpoint is required unless --replay is given");
    return cfg;
}

struct StageOpts {
    StageConfig cfg;
    std::string prompts_dir = "prompts";
};

void add_stage_opts(CLI::App* cmd, StageOpts& opts) {
    cmd->add_option("--seed", opts.cfg.seed, "Run seed for shuffling");
    cmd->add_option("--n-g", opts.cfg.n_g, "Answers per verification call")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--n-verif", opts.cfg.n_verif, "Verification repetitions")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--temp-independent", opts.cfg.temp_independent,
                    "Temperature for independent answering");
    cmd->add_option("--temp-validate", opts.cfg.temp_validate, "Temperature for GT validation");
    cmd->add_option("--temp-verify", opts.cfg.temp_verify, "Temperature for verification");
    cmd->add_option("--clarity-threshold", opts.cfg.clarity_threshold,
                    "Exclude questions at or below this clarity score")
        ->check(CLI::Range(0, 10));
    cmd->add_option("--prompts", opts.prompts_dir, "Prompt template directory");
}

json config_snapshot(const StageConfig& cfg, const BackendOpts& backend) {
    return {{"temp_independent", cfg.temp_independent},
            {"temp_validate", cfg.temp_validate},
            {"temp_verify", cfg.temp_verify},
            {"n_g", cfg.n_g},
            {"n_verif", cfg.n_verif},
            {"clarity_threshold", cfg.clarity_threshold},
            {"seed", cfg.seed},
            {"skip_independent", cfg.skip_independent},
            {"model", backend.model},
            {"max_concurrency", backend.max_concurrency},
            {"mode", backend.replay_dir.empty() ? (backend.record_dir.empty() ? "live" : "record")
                                                : "replay"}};
}

void require_readable(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing required ") + what + " file");
    if (!fs::exists(path))
        throw ConfigError(std::string(what) + " file does not exist: " + path);
}

// The manifest must hit disk before the first judge call.
void start_run(const fs::path& out_dir, RunManifest& manifest, bool force) {
    if (fs::exists(out_dir / "manifest.json") && !force)
        throw ConfigError("output directory " + out_dir.string() +
                          " already holds a run; pass --force to overwrite");
    fs::create_directories(out_dir);
    manifest.started_at = iso8601_now();
    write_text_atomic(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

void finish_run(const fs::path& out_dir, RunManifest& manifest) {
    manifest.finished_at = iso8601_now();
    write_text_atomic(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");
}

std::map<ExclusionReason, int> exclusion_histogram(const std::vector<ValidatedAnswer>& validated) {
    std::map<ExclusionReason, int> hist;
    for (const auto& v : validated)
        if (!v.validated) ++hist[v.reason];
    return hist;
}

void print_exclusion_summary(const std::vector<ValidatedAnswer>& validated) {
    auto hist = exclusion_histogram(validated);
    std::cout << "excluded:";
    if (hist.empty()) {
        std::cout << " none";
    } else {
        for (const auto& [reason, count] : hist) std::cout << ' ' << to_string(reason) << '=' << count;
    }
    std::cout << '\n';
}

std::vector<int> parse_ks(const std::string& spec) {
    std::vector<int> ks;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            ks.push_back(std::stoi(item));
        } catch (...) {
            throw ConfigError("invalid k value in --ks: " + item);
        }
        if (ks.back() < 1) throw ConfigError("k values must be >= 1");
    }
    if (ks.empty()) throw ConfigError("--ks must list at least one k");
    return ks;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    std::string questions, out;
    BackendOpts backend;
    StageOpts stage;
    bool force = false;
};

int cmd_validate(const ValidateArgs& args) {
    require_readable(args.questions, "questions");
    auto questions = load_questions(args.questions);
    PromptSet prompts = load_prompts(args.stage.prompts_dir);
    StageConfig stage_cfg = args.stage.cfg;
    stage_cfg.model = args.backend.model;

    RunManifest manifest;
    manifest.run_id = "validate";
    manifest.seed = args.stage.cfg.seed;
    manifest.config_snapshot = config_snapshot(args.stage.cfg, args.backend);
    manifest.input_digests[args.questions] = sha256_file(args.questions);
    manifest.prompt_digests = prompts.digests();
    start_run(args.out, manifest, args.force);

    JudgeClient client(make_backend(args.backend));
    bool judge_failure = false;
    std::optional<std::string> transport_error;
    auto validated =
        run_validation(questions, stage_cfg, client, prompts, &judge_failure, &transport_error);

    write_text_atomic(fs::path(args.out) / "validated_answers.jsonl",
                      validated_answers_to_jsonl(validated));
    finish_run(args.out, manifest);
    print_exclusion_summary(validated);

    if (transport_error) {
        std::cerr << "transport failure: " << *transport_error << '\n';
        return kExitTransport;
    }
    return judge_failure ? 1 : kExitOk;
}

struct JudgeArgs {
    std::string questions, predictions, validated, out;
    BackendOpts backend;
    StageOpts stage;
    bool trust_gt = false;
    bool force = false;
};

int cmd_judge(const JudgeArgs& args) {
    require_readable(args.questions, "questions");
    require_readable(args.predictions, "predictions");
    auto questions = load_questions(args.questions);
    auto predictions = load_predictions(args.predictions);
    PromptSet prompts = load_prompts(args.stage.prompts_dir);
    StageConfig stage_cfg = args.stage.cfg;
    stage_cfg.model = args.backend.model;

    if (args.stage.cfg.n_verif % 2 == 0)
        std::cerr << "warning: even --n-verif can produce Unknown tie decisions\n";

    std::vector<ValidatedAnswer> validated;
    if (args.trust_gt) {
        for (const auto& q : questions) validated.push_back({q.id, true, q.gt_answer, {}});
    } else {
        require_readable(args.validated, "validated-answers");
        validated = load_validated_answers(args.validated);
    }
    std::map<std::string, const ValidatedAnswer*> validated_by_id;
    for (const auto& v : validated) validated_by_id[v.question_id] = &v;

    RunManifest manifest;
    manifest.run_id = "judge";
    manifest.seed = args.stage.cfg.seed;
    manifest.config_snapshot = config_snapshot(args.stage.cfg, args.backend);
    manifest.config_snapshot["trust_gt"] = args.trust_gt;
    manifest.input_digests[args.questions] = sha256_file(args.questions);
    manifest.input_digests[args.predictions] = sha256_file(args.predictions);
    if (!args.trust_gt) manifest.input_digests[args.validated] = sha256_file(args.validated);
    manifest.prompt_digests = prompts.digests();
    start_run(args.out, manifest, args.force);

    JudgeClient client(make_backend(args.backend));

    // Join predictions against validated questions.
    std::map<std::string, std::vector<Prediction>> preds_by_question;
    for (const auto& p : predictions) preds_by_question[p.question_id].push_back(p);
    std::map<std::string, const Question*> questions_by_id;
    for (const auto& q : questions) questions_by_id[q.id] = &q;
    {
        std::string unknown;
        for (const auto& [qid, _] : preds_by_question)
            if (!questions_by_id.count(qid)) unknown += (unknown.empty() ? "" : ", ") + qid;
        if (!unknown.empty())
            throw DataJoinError("predictions reference unknown question ids: " + unknown);
    }

    std::vector<Verdict> verdicts;
    std::optional<std::string> transport_error;
    bool judge_failure = false;
    for (const auto& q : questions) {
        auto vit = validated_by_id.find(q.id);
        if (vit == validated_by_id.end() || !vit->second->validated) continue;
        auto pit = preds_by_question.find(q.id);
        if (pit == preds_by_question.end()) continue;
        try {
            auto qv = verify_predictions(q, *vit->second, pit->second, stage_cfg, client, prompts);
            verdicts.insert(verdicts.end(), qv.begin(), qv.end());
        } catch (const TransportError& e) {
            if (!transport_error) transport_error = e.what();
            judge_failure = true;
        }
    }

    auto stats = collect_stats(verdicts);
    std::vector<SourceReport> sources;
    if (!stats.empty()) {
        int min_n = stats.front().n;
        for (const auto& s : stats) min_n = std::min(min_n, s.n);
        long unknowns = 0;
        for (const auto& v : verdicts)
            if (v.decision == Decision::Unknown) ++unknowns;
        sources.push_back({"judge", curve(stats, default_ks(min_n)), unknowns});
    }
    write_results(manifest, verdicts, build_report_json(sources, validated),
                  build_report_csv(sources), args.out, /*force=*/true);
    finish_run(args.out, manifest);

    if (transport_error) {
        std::cerr << "transport failure (partial results written): " << *transport_error << '\n';
        return kExitTransport;
    }
    return judge_failure ? 1 : kExitOk;
}

struct BaselineArgs {
    std::string questions, predictions, out;
    BaselineConfig cfg;
    bool force = false;
};

int cmd_baseline(const BaselineArgs& args) {
    require_readable(args.questions, "questions");
    require_readable(args.predictions, "predictions");
    auto questions = load_questions(args.questions);
    auto predictions = load_predictions(args.predictions);

    RunManifest manifest;
    manifest.run_id = "baseline";
    manifest.config_snapshot = {{"abs_tol", args.cfg.abs_tol},
                                {"rel_tol", args.cfg.rel_tol},
                                {"strip_percent", args.cfg.strip_percent}};
    manifest.input_digests[args.questions] = sha256_file(args.questions);
    manifest.input_digests[args.predictions] = sha256_file(args.predictions);
    start_run(args.out, manifest, args.force);

    auto verdicts = baseline_verdicts(questions, predictions, args.cfg);

    auto stats = collect_stats(verdicts);
    std::vector<SourceReport> sources;
    if (!stats.empty()) {
        int min_n = stats.front().n;
        for (const auto& s : stats) min_n = std::min(min_n, s.n);
        sources.push_back({"baseline", curve(stats, default_ks(min_n)), 0});
    }
    write_results(manifest, verdicts, build_report_json(sources, {}), build_report_csv(sources),
                  args.out, /*force=*/true);
    finish_run(args.out, manifest);
    return kExitOk;
}

struct ReportArgs {
    std::vector<std::string> verdict_files;
    std::string out;
    std::string ks_spec;
    bool svg = false;
    bool intersect = false;
    bool force = false;
};

int cmd_report(const ReportArgs& args) {
    if (args.verdict_files.empty()) throw ConfigError("report needs at least one verdicts file");

    struct SourceData {
        std::string source;
        std::vector<Verdict> verdicts;
    };
    std::vector<SourceData> sources;
    for (const auto& file : args.verdict_files) {
        require_readable(file, "verdicts");
        auto verdicts = load_verdicts(file);
        if (verdicts.empty()) throw ConfigError("verdicts file is empty: " + file);
        std::string source = to_string(verdicts.front().source);
        auto it = std::find_if(sources.begin(), sources.end(),
                               [&](const SourceData& s) { return s.source == source; });
        if (it == sources.end()) {
            sources.push_back({source, std::move(verdicts)});
        } else {
            it->verdicts.insert(it->verdicts.end(), verdicts.begin(), verdicts.end());
        }
    }

    // Question sets must agree across sources unless --intersect.
    std::vector<std::set<std::string>> question_sets;
    for (const auto& s : sources) {
        std::set<std::string> qs;
        for (const auto& v : s.verdicts) qs.insert(v.question_id);
        question_sets.push_back(std::move(qs));
    }
    std::set<std::string> common = question_sets.front();
    for (const auto& qs : question_sets) {
        std::set<std::string> next;
        std::set_intersection(common.begin(), common.end(), qs.begin(), qs.end(),
                              std::inserter(next, next.begin()));
        common = std::move(next);
    }
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (question_sets[i] != common) {
            if (!args.intersect)
                throw DataJoinError("question sets differ across verdict sources (source \"" +
                                    sources[i].source + "\"); pass --intersect to use the overlap");
            std::erase_if(sources[i].verdicts,
                          [&](const Verdict& v) { return !common.count(v.question_id); });
        }
    }

    std::vector<SourceReport> reports;
    int min_n = 0;
    std::vector<std::vector<SampleStats>> all_stats;
    for (const auto& s : sources) {
        auto stats = collect_stats(s.verdicts);
        if (stats.empty()) throw ConfigError("no verdicts left for source " + s.source);
        for (const auto& st : stats) min_n = min_n == 0 ? st.n : std::min(min_n, st.n);
        all_stats.push_back(std::move(stats));
    }
    std::vector<int> ks = args.ks_spec.empty() ? default_ks(min_n) : parse_ks(args.ks_spec);
    for (std::size_t i = 0; i < sources.size(); ++i) {
        long unknowns = 0;
        for (const auto& v : sources[i].verdicts)
            if (v.decision == Decision::Unknown) ++unknowns;
        reports.push_back({sources[i].source, curve(all_stats[i], ks), unknowns});
    }

    RunManifest manifest;
    manifest.run_id = "report";
    for (const auto& file : args.verdict_files) manifest.input_digests[file] = sha256_file(file);
    manifest.config_snapshot = {{"ks", ks}, {"intersect", args.intersect}};
    start_run(args.out, manifest, args.force);

    write_text_atomic(fs::path(args.out) / "report.json",
                      build_report_json(reports, {}).dump(2) + "\n");
    write_text_atomic(fs::path(args.out) / "report.csv", build_report_csv(reports));
    if (args.svg)
        write_text_atomic(fs::path(args.out) / "report.svg", render_svg_chart(reports));
    finish_run(args.out, manifest);
    return kExitOk;
}

struct MetaEvalArgs {
    std::string labels, out;
    std::vector<std::string> verdict_files;
    std::string grid_file;
    std::string questions, predictions;
    BackendOpts backend;
    StageOpts stage;
    bool allow_live = false;
    bool force = false;
};

int cmd_metaeval(const MetaEvalArgs& args) {
    require_readable(args.labels, "labels");
    auto labels = load_labels(args.labels);

    RunManifest manifest;
    manifest.run_id = "metaeval";
    manifest.input_digests[args.labels] = sha256_file(args.labels);

    std::string csv;
    if (!args.grid_file.empty()) {
        require_readable(args.grid_file, "grid");
        require_readable(args.questions, "questions");
        require_readable(args.predictions, "predictions");
        if (args.backend.replay_dir.empty() && !args.allow_live)
            throw ConfigError(
                "metaeval grid runs are replay-first; pass --allow-live to hit a live endpoint");
        auto questions = load_questions(args.questions);
        auto predictions = load_predictions(args.predictions);
        auto specs = load_grid_specs(args.grid_file);
        PromptSet prompts = load_prompts(args.stage.prompts_dir);
        manifest.input_digests[args.questions] = sha256_file(args.questions);
        manifest.input_digests[args.predictions] = sha256_file(args.predictions);
        manifest.input_digests[args.grid_file] = sha256_file(args.grid_file);
        manifest.config_snapshot = config_snapshot(args.stage.cfg, args.backend);
        start_run(args.out, manifest, args.force);

        JudgeClient client(make_backend(args.backend));
        StageConfig stage_cfg = args.stage.cfg;
        stage_cfg.model = args.backend.model;
        auto rows = run_grid(questions, predictions, labels, specs, stage_cfg, client, prompts);
        csv = grid_to_csv(rows);
    } else if (!args.verdict_files.empty()) {
        start_run(args.out, manifest, args.force);
        std::vector<GridRow> rows;
        for (const auto& file : args.verdict_files) {
            require_readable(file, "verdicts");
            auto verdicts = load_verdicts(file);
            GridRow row;
            row.label = verdicts.empty() ? file : to_string(verdicts.front().source);
            row.is_baseline = true;  // temps not applicable to precomputed verdicts
            MetaEvalReport report = confusion(verdicts, labels);
            row.counts = report.counts;
            row.unknown_count = report.unknown_count;
            rows.push_back(std::move(row));
        }
        std::sort(rows.begin(), rows.end(), [](const GridRow& a, const GridRow& b) {
            return a.counts.f1_score() < b.counts.f1_score();
        });
        csv = grid_to_csv(rows);
    } else {
        throw ConfigError("metaeval needs verdicts files or --grid");
    }

    write_text_atomic(fs::path(args.out) / "metaeval.csv", csv);
    finish_run(args.out, manifest);
    std::cout << csv;
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Math reasoning evaluation harness: judge pipeline, symbolic baseline, pass@k"};
    app.require_subcommand(1);
    app.set_config("--config")->configurable(false);
    app.allow_config_extras(false);

    ValidateArgs vargs;
    auto* validate = app.add_subcommand("validate", "Validate dataset GT answers (stages 1-2)");
    validate->add_option("--questions", vargs.questions, "questions.jsonl")->required();
    validate->add_option("--out", vargs.out, "Output run directory")->required();
    validate->add_flag("--force", vargs.force, "Overwrite an existing run directory");
    add_backend_opts(validate, vargs.backend);
    add_stage_opts(validate, vargs.stage);

    JudgeArgs jargs;
    auto* judge = app.add_subcommand("judge", "Judge predictions against validated answers");
    judge->add_option("--questions", jargs.questions, "questions.jsonl")->required();
    judge->add_option("--predictions", jargs.predictions, "predictions.jsonl")->required();
    judge->add_option("--validated", jargs.validated,
                      "validated_answers.jsonl from a validate run");
    judge->add_flag("--trust-gt", jargs.trust_gt,
                    "Use raw dataset answers instead of validated answers");
    judge->add_option("--out", jargs.out, "Output run directory")->required();
    judge->add_flag("--force", jargs.force, "Overwrite an existing run directory");
    add_backend_opts(judge, jargs.backend);
    add_stage_opts(judge, jargs.stage);

    BaselineArgs bargs;
    auto* baseline = app.add_subcommand("baseline", "Rule-based symbolic comparison arm");
    baseline->add_option("--questions", bargs.questions, "questions.jsonl")->required();
    baseline->add_option("--predictions", bargs.predictions, "predictions.jsonl")->required();
    baseline->add_option("--out", bargs.out, "Output run directory")->required();
    baseline->add_option("--abs-tol", bargs.cfg.abs_tol, "Absolute tolerance");
    baseline->add_option("--rel-tol", bargs.cfg.rel_tol, "Relative tolerance");
    baseline->add_flag("--force", bargs.force, "Overwrite an existing run directory");

    ReportArgs rargs;
    auto* report = app.add_subcommand("report", "pass@k curves from verdicts files");
    report->add_option("verdicts", rargs.verdict_files, "verdicts.jsonl files")->required();
    report->add_option("--out", rargs.out, "Output run directory")->required();
    report->add_option("--ks", rargs.ks_spec, "Comma-separated k values (default powers of two)");
    report->add_flag("--svg", rargs.svg, "Also write report.svg");
    report->add_flag("--intersect", rargs.intersect,
                     "Restrict all sources to the common question set");
    report->add_flag("--force", rargs.force, "Overwrite an existing run directory");

    MetaEvalArgs margs;
    auto* metaeval = app.add_subcommand("metaeval", "Verifier meta-evaluation vs human labels");
    metaeval->add_option("--labels", margs.labels, "labels.jsonl")->required();
    metaeval->add_option("verdicts", margs.verdict_files, "verdicts.jsonl files");
    metaeval->add_option("--grid", margs.grid_file, "Ablation grid file");
    metaeval->add_option("--questions", margs.questions, "questions.jsonl (grid mode)");
    metaeval->add_option("--predictions", margs.predictions, "predictions.jsonl (grid mode)");
    metaeval->add_option("--out", margs.out, "Output run directory")->required();
    metaeval->add_flag("--allow-live", margs.allow_live, "Permit live judge calls in grid mode");
    metaeval->add_flag("--force", margs.force, "Overwrite an existing run directory");
    add_backend_opts(metaeval, margs.backend);
    add_stage_opts(metaeval, margs.stage);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*validate) return cmd_validate(vargs);
        if (*judge) return cmd_judge(jargs);
        if (*baseline) return cmd_baseline(bargs);
        if (*report) return cmd_report(rargs);
        if (*metaeval) return cmd_metaeval(margs);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << '\n';
        return kExitTransport;
    } catch (const DataJoinError& e) {
        std::cerr << "data join error: " << e.what() << '\n';
        return kExitDataJoin;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitConfig;
}
