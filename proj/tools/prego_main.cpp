// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: turn per-frame label streams into action
// sequences, compare aggregation strategies, run mistake detection against
// a chosen anticipator, preview prompts, and generate synthetic datasets.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "prego/aggregation.hpp"
#include "prego/anticipation.hpp"
#include "prego/dataset.hpp"
#include "prego/detection.hpp"
#include "prego/io_util.hpp"
#include "prego/llm_client.hpp"
#include "prego/sequence_metrics.hpp"
#include "prego/version.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace prego;

std::string iso_utc_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_argv(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) out += ' ';
        out += argv[i];
    }
    return out;
}

json manifest_to_json(const RunManifest& manifest) {
    json mf;
    mf["artifact_version"] = manifest.artifact_version;
    mf["command_line"] = manifest.command_line;
    mf["timestamp"] = manifest.timestamp;
    mf["seed"] = manifest.seed;
    json cfg = json::object();
    for (const auto& [key, value] : manifest.config) cfg[key] = value;
    mf["config"] = std::move(cfg);
    return mf;
}

const std::map<std::string, Strategy> kStrategies = {
    {"nonoverlap", Strategy::NonOverlapping},
    {"trailing", Strategy::TrailingWindow},
    {"centered", Strategy::CenteredWindow},
};
const std::map<std::string, TieBreak> kTieBreaks = {
    {"smallest-id", TieBreak::SmallestLabelId},
    {"earliest-occurrence", TieBreak::EarliestFirstOccurrence},
};
const std::map<std::string, AnticipatorKind> kAnticipators = {
    {"transition", AnticipatorKind::Transition}, {"ngram", AnticipatorKind::Ngram},
    {"llm", AnticipatorKind::Llm},               {"best", AnticipatorKind::Best},
    {"worst", AnticipatorKind::Worst},           {"random", AnticipatorKind::Random},
};
const std::map<std::string, PromptScheme> kSchemes = {
    {"zs", PromptScheme::ZeroShot},
    {"fs", PromptScheme::FewShot},
    {"acot", PromptScheme::ACoT},
};
const std::map<std::string, Modality> kModalities = {
    {"text", Modality::Textual},
    {"num", Modality::Numerical},
};

struct CommonIo {
    std::string input;
    std::string vocab;
    std::string timestamp;

    Dataset load() const {
        return vocab.empty() ? load_dataset(input) : load_dataset(input, vocab);
    }
};

void add_io_options(CLI::App* cmd, CommonIo& io, bool with_timestamp = true) {
    cmd->add_option("--input", io.input, "dataset JSONL file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--vocab", io.vocab, "vocabulary JSON (default: <input>.vocab.json)");
    if (with_timestamp) {
        cmd->add_option("--timestamp", io.timestamp,
                        "manifest timestamp override (for reproducible output files)");
    }
}

RunManifest make_manifest(const std::string& command_line, const std::string& timestamp,
                          std::uint64_t seed, std::map<std::string, std::string> config) {
    RunManifest mf;
    mf.artifact_version = kArtifactVersion;
    mf.command_line = command_line;
    mf.timestamp = timestamp.empty() ? iso_utc_now() : timestamp;
    mf.seed = seed;
    mf.config = std::move(config);
    return mf;
}

// ---------------------------------------------------------------- aggregate

struct AggregateArgs {
    CommonIo io;
    std::string strategy = "nonoverlap";
    int window = 500;
    std::string tie_break = "smallest-id";
    std::string out;
};

int run_aggregate(const AggregateArgs& args, const std::string& command_line) {
    const Dataset ds = args.io.load();
    const AggregationConfig cfg{kStrategies.at(args.strategy), args.window,
                                kTieBreaks.at(args.tie_break)};

    const RunManifest manifest = make_manifest(
        command_line, args.io.timestamp, 0,
        {{"command", "aggregate"},
         {"input", args.io.input},
         {"strategy", args.strategy},
         {"window", std::to_string(args.window)},
         {"tie_break", args.tie_break}});

    std::string lines = json{{"manifest", manifest_to_json(manifest)}}.dump() + "\n";
    double total_sim = 0.0;
    for (const VideoRecord& rec : ds.records) {
        const ActionSequence seq = smooth_and_collapse(rec.recognizer_labels, cfg);
        const std::vector<LabelId> gt = segment_from_frames(rec.gt_labels).labels();
        const std::vector<LabelId> got = seq.labels();
        const double sim = levenshtein_similarity(got, gt);
        total_sim += sim;

        json obj;
        obj["video_id"] = rec.video_id;
        obj["task_id"] = rec.task_id;
        obj["segments"] = json::array();
        for (const ActionSegment& s : seq.segments) {
            obj["segments"].push_back(json{{"label", s.label}, {"start", s.start}, {"end", s.end}});
        }
        obj["labels"] = got;
        obj["similarity_vs_gt"] = sim;
        lines += obj.dump() + "\n";
    }
    write_file_atomic(args.out, lines);

    std::printf("aggregated %zu videos (strategy %s, window %d) -> %s\n", ds.records.size(),
                args.strategy.c_str(), args.window, args.out.c_str());
    if (!ds.records.empty()) {
        std::printf("mean levenshtein similarity vs gt: %.4f\n",
                    total_sim / static_cast<double>(ds.records.size()));
    }
    return 0;
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
    CommonIo io;
    std::string strategy = "all";
    std::vector<int> windows;
    std::string tie_break = "smallest-id";
    std::string out;
};

int run_sweep(const SweepArgs& args, const std::string& command_line) {
    if (args.windows.empty()) {
        throw InvalidInputError("--windows needs at least one window length");
    }
    const Dataset ds = args.io.load();

    std::vector<std::string> strategies;
    if (args.strategy == "all") {
        strategies = {"nonoverlap", "trailing", "centered"};
    } else {
        strategies = {args.strategy};
    }

    std::string windows_str;
    for (std::size_t i = 0; i < args.windows.size(); ++i) {
        if (i > 0) windows_str += ",";
        windows_str += std::to_string(args.windows[i]);
    }
    const RunManifest manifest = make_manifest(command_line, args.io.timestamp, 0,
                                               {{"command", "sweep"},
                                                {"input", args.io.input},
                                                {"strategy", args.strategy},
                                                {"windows", windows_str},
                                                {"tie_break", args.tie_break}});

    std::string csv = "# manifest: " + manifest_to_json(manifest).dump() + "\n";
    csv += "strategy,window,mean_similarity,videos\n";

    std::vector<std::vector<LabelId>> gt_labels;
    gt_labels.reserve(ds.records.size());
    for (const VideoRecord& rec : ds.records) {
        gt_labels.push_back(segment_from_frames(rec.gt_labels).labels());
    }

    char row[128];
    for (const std::string& strategy : strategies) {
        for (int window : args.windows) {
            const AggregationConfig cfg{kStrategies.at(strategy), window,
                                        kTieBreaks.at(args.tie_break)};
            double total = 0.0;
            for (std::size_t i = 0; i < ds.records.size(); ++i) {
                const ActionSequence seq =
                    smooth_and_collapse(ds.records[i].recognizer_labels, cfg);
                total += levenshtein_similarity(seq.labels(), gt_labels[i]);
            }
            const double mean =
                ds.records.empty() ? 0.0 : total / static_cast<double>(ds.records.size());
            std::snprintf(row, sizeof(row), "%s,%d,%.6f,%zu\n", strategy.c_str(), window, mean,
                          ds.records.size());
            csv += row;
        }
    }
    write_file_atomic(args.out, csv);
    std::printf("swept %zu strategies x %zu windows over %zu videos -> %s\n", strategies.size(),
                args.windows.size(), ds.records.size(), args.out.c_str());
    return 0;
}

// ------------------------------------------------------------------- detect

struct DetectArgs {
    CommonIo io;
    std::string anticipator;
    int ngram_order = 2;
    std::string scheme = "fs";
    std::string modality = "text";
    std::string strategy = "nonoverlap";
    int window = 500;
    std::string tie_break = "smallest-id";
    std::uint64_t seed = 0;
    int jobs = 1;
    bool skip_no_prediction = false;
    int context_cap = 5;
    std::string out;
    // llm client
    std::string endpoint;
    std::string model = "default";
    long long llm_timeout_ms = 30000;
    int max_retries = 2;
    int max_in_flight = 4;
};

int run_detect(const DetectArgs& args, const std::string& command_line) {
    const Dataset ds = args.io.load();

    PipelineOptions opt;
    opt.agg = {kStrategies.at(args.strategy), args.window, kTieBreaks.at(args.tie_break)};
    opt.anticipator = kAnticipators.at(args.anticipator);
    opt.ngram_order = args.ngram_order;
    opt.scheme = kSchemes.at(args.scheme);
    opt.modality = kModalities.at(args.modality);
    opt.context_cap = args.context_cap;
    opt.policy.flag_on_no_prediction = !args.skip_no_prediction;
    opt.seed = args.seed;
    opt.jobs = args.jobs;

    std::unique_ptr<LlmClient> client;
    if (opt.anticipator == AnticipatorKind::Llm) {
        ClientConfig cfg;
        cfg.endpoint_url = args.endpoint;
        cfg.model_name = args.model;
        cfg.timeout = std::chrono::milliseconds(args.llm_timeout_ms);
        cfg.max_retries = args.max_retries;
        cfg.max_in_flight = args.max_in_flight;
        cfg = apply_env_overrides(cfg);
        if (cfg.endpoint_url.empty()) {
            throw InvalidInputError(
                "the llm anticipator needs --endpoint or PREGO_LLM_ENDPOINT");
        }
        client = std::make_unique<LlmClient>(cfg);
        opt.client = client.get();
    }

    std::map<std::string, std::string> config = {
        {"command", "detect"},
        {"input", args.io.input},
        {"strategy", args.strategy},
        {"window", std::to_string(args.window)},
        {"tie_break", args.tie_break},
        {"anticipator", args.anticipator},
        {"ngram_order", std::to_string(args.ngram_order)},
        {"scheme", args.scheme},
        {"modality", args.modality},
        {"context_cap", std::to_string(args.context_cap)},
        {"flag_on_no_prediction", opt.policy.flag_on_no_prediction ? "true" : "false"},
        {"jobs", std::to_string(args.jobs)}};
    if (opt.anticipator == AnticipatorKind::Llm) {
        config["endpoint"] = opt.client->config().endpoint_url;
        config["model"] = opt.client->config().model_name;
    }
    const RunManifest manifest =
        make_manifest(command_line, args.io.timestamp, args.seed, std::move(config));

    const DetectionReport report = run_pipeline(ds, opt);

    write_file_atomic(args.out, detection_report_to_json(report, manifest));
    std::printf("detect: %d train / %d test videos, anticipator %s, window %d\n",
                report.train_videos, report.test_videos, args.anticipator.c_str(), args.window);
    std::fputs(render_report_table(report).c_str(), stdout);
    std::printf("report written to %s\n", args.out.c_str());
    return 0;
}

// ----------------------------------------------------------- prompt-preview

struct PreviewArgs {
    CommonIo io;
    std::string video;
    int step = 0;
    std::string scheme = "fs";
    std::string modality = "text";
    int context_cap = 5;
    std::string strategy = "nonoverlap";
    int window = 1;
};

int run_preview(const PreviewArgs& args) {
    const Dataset ds = args.io.load();

    const VideoRecord* record = nullptr;
    for (const VideoRecord& rec : ds.records) {
        if (rec.video_id == args.video) {
            record = &rec;
            break;
        }
    }
    if (record == nullptr) {
        throw InvalidInputError("no video with id '" + args.video + "' in " + args.io.input);
    }

    const AggregationConfig cfg{kStrategies.at(args.strategy), args.window,
                                TieBreak::SmallestLabelId};
    const ActionSequence seq = smooth_and_collapse(record->recognizer_labels, cfg);
    if (args.step < 0 || args.step >= seq.size()) {
        throw InvalidInputError("step " + std::to_string(args.step) + " out of range; video '" +
                                args.video + "' has " + std::to_string(seq.size()) +
                                " aggregated steps");
    }

    PromptContext ctx;
    ctx.task_id = record->task_id;
    ctx.modality = kModalities.at(args.modality);
    const std::vector<LabelId> labels = seq.labels();
    ctx.current_sequence.assign(labels.begin(), labels.begin() + args.step);

    const OccSplit split = build_occ_split(ds.records);
    for (const VideoRecord& rec : split.train) {
        if (rec.task_id != record->task_id || rec.video_id == record->video_id) continue;
        if (static_cast<int>(ctx.transcripts.size()) >= args.context_cap) break;
        ctx.transcripts.push_back({rec.task_id, segment_from_frames(rec.gt_labels).labels()});
    }

    const PromptBundle bundle = build_prompt(ctx, kSchemes.at(args.scheme), ds.vocab);
    std::printf("=== system ===\n%s", bundle.system.c_str());
    if (bundle.stage_one_user) {
        std::printf("=== stage 1 user (reasoning query) ===\n%s", bundle.stage_one_user->c_str());
        std::printf("=== stage 2 user (prediction query) ===\n%s", bundle.stage_two_user.c_str());
    } else {
        std::printf("=== user ===\n%s", bundle.stage_two_user.c_str());
    }
    return 0;
}

// ----------------------------------------------------------------- generate

struct GenerateArgs {
    std::string spec_path;
    int train = 20;
    int test = 10;
    std::string out;
    std::string vocab_out;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

int run_generate(const GenerateArgs& args) {
    SyntheticSpec spec =
        args.spec_path.empty() ? default_synthetic_spec() : load_synthetic_spec(args.spec_path);
    if (args.seed_set) spec.seed = args.seed;
    validate_spec(spec);

    const Dataset ds = generate_synthetic(spec, args.train, args.test);
    const std::filesystem::path vocab_path =
        args.vocab_out.empty() ? default_vocab_path(args.out) : std::filesystem::path(args.vocab_out);
    save_dataset(ds, args.out, vocab_path);

    std::printf("generated %d train + %d test videos (%d labels, seed %llu)\n", args.train,
                args.test, spec.vocab_size, static_cast<unsigned long long>(spec.seed));
    std::printf("dataset: %s\nvocabulary: %s\n", args.out.c_str(), vocab_path.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"online procedural mistake detection over action-label streams"};
    app.set_version_flag("--version", kArtifactVersion);
    app.require_subcommand(1);
    const std::string command_line = join_argv(argc, argv);

    AggregateArgs agg;
    CLI::App* cmd_aggregate =
        app.add_subcommand("aggregate", "smooth per-frame labels into action sequences");
    add_io_options(cmd_aggregate, agg.io);
    cmd_aggregate->add_option("--strategy", agg.strategy)
        ->check(CLI::IsMember({"nonoverlap", "trailing", "centered"}));
    cmd_aggregate->add_option("--window", agg.window, "window length in frames")
        ->check(CLI::PositiveNumber);
    cmd_aggregate->add_option("--tie-break", agg.tie_break)
        ->check(CLI::IsMember({"smallest-id", "earliest-occurrence"}));
    cmd_aggregate->add_option("--out", agg.out, "output JSONL")->required();

    SweepArgs sweep;
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "similarity-vs-window table across strategies");
    add_io_options(cmd_sweep, sweep.io);
    cmd_sweep->add_option("--strategy", sweep.strategy)
        ->check(CLI::IsMember({"nonoverlap", "trailing", "centered", "all"}));
    cmd_sweep->add_option("--windows", sweep.windows, "comma-separated window lengths")
        ->required()
        ->delimiter(',');
    cmd_sweep->add_option("--tie-break", sweep.tie_break)
        ->check(CLI::IsMember({"smallest-id", "earliest-occurrence"}));
    cmd_sweep->add_option("--out", sweep.out, "output CSV")->required();

    DetectArgs det;
    CLI::App* cmd_detect = app.add_subcommand("detect", "run mistake detection and score it");
    add_io_options(cmd_detect, det.io);
    cmd_detect->add_option("--anticipator", det.anticipator)
        ->required()
        ->check(CLI::IsMember({"transition", "ngram", "llm", "best", "worst", "random"}));
    cmd_detect->add_option("--ngram-order", det.ngram_order)->check(CLI::PositiveNumber);
    cmd_detect->add_option("--scheme", det.scheme)->check(CLI::IsMember({"zs", "fs", "acot"}));
    cmd_detect->add_option("--modality", det.modality)->check(CLI::IsMember({"text", "num"}));
    cmd_detect->add_option("--strategy", det.strategy)
        ->check(CLI::IsMember({"nonoverlap", "trailing", "centered"}));
    cmd_detect->add_option("--window", det.window)->check(CLI::PositiveNumber);
    cmd_detect->add_option("--tie-break", det.tie_break)
        ->check(CLI::IsMember({"smallest-id", "earliest-occurrence"}));
    cmd_detect->add_option("--seed", det.seed, "seed for the random baseline");
    cmd_detect->add_option("--jobs", det.jobs, "videos processed in parallel")
        ->check(CLI::PositiveNumber);
    cmd_detect->add_flag("--skip-no-prediction", det.skip_no_prediction,
                         "do not flag steps where the anticipator has no prediction");
    cmd_detect->add_option("--context-cap", det.context_cap,
                           "max context transcripts per prompt");
    cmd_detect->add_option("--out", det.out, "report JSON path")->required();
    cmd_detect->add_option("--endpoint", det.endpoint, "completion endpoint URL (llm)");
    cmd_detect->add_option("--model", det.model, "model name sent on the wire (llm)");
    cmd_detect->add_option("--llm-timeout-ms", det.llm_timeout_ms);
    cmd_detect->add_option("--max-retries", det.max_retries);
    cmd_detect->add_option("--max-in-flight", det.max_in_flight);

    PreviewArgs preview;
    CLI::App* cmd_preview =
        app.add_subcommand("prompt-preview", "print the exact prompt bytes for one step");
    add_io_options(cmd_preview, preview.io, /*with_timestamp=*/false);
    cmd_preview->add_option("--video", preview.video)->required();
    cmd_preview->add_option("--step", preview.step, "aggregated step index (0-based)")
        ->required();
    cmd_preview->add_option("--scheme", preview.scheme)
        ->check(CLI::IsMember({"zs", "fs", "acot"}));
    cmd_preview->add_option("--modality", preview.modality)->check(CLI::IsMember({"text", "num"}));
    cmd_preview->add_option("--context-cap", preview.context_cap);
    cmd_preview->add_option("--strategy", preview.strategy)
        ->check(CLI::IsMember({"nonoverlap", "trailing", "centered"}));
    cmd_preview->add_option("--window", preview.window)->check(CLI::PositiveNumber);

    GenerateArgs gen;
    CLI::App* cmd_generate = app.add_subcommand("generate", "emit a synthetic dataset");
    cmd_generate->add_option("--spec", gen.spec_path, "synthetic spec JSON")
        ->check(CLI::ExistingFile);
    cmd_generate->add_option("--train", gen.train)->check(CLI::NonNegativeNumber);
    cmd_generate->add_option("--test", gen.test)->check(CLI::NonNegativeNumber);
    cmd_generate->add_option("--out", gen.out, "dataset JSONL path")->required();
    cmd_generate->add_option("--vocab-out", gen.vocab_out,
                             "vocabulary path (default: <out>.vocab.json)");
    cmd_generate->add_option("--seed", gen.seed, "override the spec seed")
        ->trigger_on_parse()
        ->each([&gen](const std::string&) { gen.seed_set = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cmd_aggregate->parsed()) return run_aggregate(agg, command_line);
        if (cmd_sweep->parsed()) return run_sweep(sweep, command_line);
        if (cmd_detect->parsed()) return run_detect(det, command_line);
        if (cmd_preview->parsed()) return run_preview(preview);
        if (cmd_generate->parsed()) return run_generate(gen);
    } catch (const ClientError& e) {
        std::fprintf(stderr, "error (completion service): %s\n", e.what());
        return 3;
    } catch (const ProtocolError& e) {
        std::fprintf(stderr, "error (completion protocol): %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected error: %s\n", e.what());
        return 1;
    }
    return 0;
}
