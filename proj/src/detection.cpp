// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/detection.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <thread>

#include "prego/hash.hpp"

namespace prego {

std::vector<StepVerdict> detect_procedure(const ActionSequence& seq, Anticipator& anticipator,
                                          const DetectionContext& ctx) {
    if (!seq.collapsed) {
        throw InvalidInputError("detection needs a duplicate-collapsed sequence");
    }
    validate_sequence(seq);
    const std::vector<LabelId> labels = seq.labels();
    const int steps = static_cast<int>(labels.size());

    std::vector<StepVerdict> verdicts;
    verdicts.reserve(labels.size());
    for (int t = 0; t < steps; ++t) {
        AnticipationQuery query;
        query.history = std::span<const LabelId>(labels.data(), static_cast<std::size_t>(t));
        query.step_index = t;
        query.recognized = labels[static_cast<std::size_t>(t)];
        query.oracle_is_mistake = ctx.is_mistake_procedure && t == steps - 1;
        query.task_id = ctx.task_id;

        const AnticipatorVerdict verdict = anticipator.anticipate(query);
        bool flagged;
        if (verdict.kind == AnticipatorVerdict::Kind::NoPrediction) {
            flagged = ctx.policy.flag_on_no_prediction;
        } else {
            flagged = !verdict.permits(query.recognized);
        }

        const ActionSegment& segment = seq.segments[static_cast<std::size_t>(t)];
        verdicts.push_back({t, query.recognized, verdict, flagged, segment.start, segment.end});
    }
    return verdicts;
}

ConfusionCounts score_sequence_level(const std::vector<StepVerdict>& verdicts,
                                     const MistakeAnnotation& annotation) {
    ConfusionCounts counts;
    if (verdicts.empty()) return counts;

    const bool mistake_video = is_procedural_mistake(annotation);
    if (mistake_video && *annotation.first_mistake_frame >= verdicts.back().span_end) {
        throw InvariantViolationError(
            "annotation points at frame " + std::to_string(*annotation.first_mistake_frame) +
            " but the evaluated steps end at frame " + std::to_string(verdicts.back().span_end) +
            "; was the stream trimmed to its first mistake?");
    }

    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const bool is_positive = mistake_video && i + 1 == verdicts.size();
        const bool flagged = verdicts[i].flagged_mistake;
        if (is_positive) {
            flagged ? ++counts.tp : ++counts.fn;
        } else {
            flagged ? ++counts.fp : ++counts.tn;
        }
    }
    return counts;
}

ConfusionCounts expand_verdicts_to_frames(const std::vector<StepVerdict>& verdicts,
                                          const FrameStream& gt_stream,
                                          const MistakeAnnotation& annotation) {
    int cursor = 0;
    for (const StepVerdict& v : verdicts) {
        if (v.span_start != cursor) {
            throw InvariantViolationError("verdict spans do not tile the stream: expected start " +
                                          std::to_string(cursor) + ", got " +
                                          std::to_string(v.span_start));
        }
        cursor = v.span_end;
    }
    if (cursor != gt_stream.length()) {
        throw InvariantViolationError("verdict spans cover " + std::to_string(cursor) +
                                      " frames but the stream has " +
                                      std::to_string(gt_stream.length()));
    }

    const int mistake_from =
        is_procedural_mistake(annotation) ? *annotation.first_mistake_frame : gt_stream.length();

    ConfusionCounts counts;
    for (const StepVerdict& v : verdicts) {
        const int mistake_frames = std::max(0, v.span_end - std::max(v.span_start, mistake_from));
        const int correct_frames = (v.span_end - v.span_start) - mistake_frames;
        if (v.flagged_mistake) {
            counts.tp += mistake_frames;
            counts.fp += correct_frames;
        } else {
            counts.fn += mistake_frames;
            counts.tn += correct_frames;
        }
    }
    return counts;
}

const char* anticipator_kind_name(AnticipatorKind k) {
    switch (k) {
        case AnticipatorKind::Transition: return "transition";
        case AnticipatorKind::Ngram: return "ngram";
        case AnticipatorKind::Llm: return "llm";
        case AnticipatorKind::Best: return "best";
        case AnticipatorKind::Worst: return "worst";
        case AnticipatorKind::Random: return "random";
    }
    return "?";
}

namespace {

std::vector<ActionSequence> training_sequences(const std::vector<VideoRecord>& train) {
    std::vector<ActionSequence> out;
    out.reserve(train.size());
    for (const VideoRecord& rec : train) {
        out.push_back(segment_from_frames(rec.gt_labels));
    }
    return out;
}

std::map<std::string, std::vector<TranscriptExample>> transcripts_by_task(
    const std::vector<VideoRecord>& train) {
    std::map<std::string, std::vector<TranscriptExample>> out;
    for (const VideoRecord& rec : train) {
        out[rec.task_id].push_back(
            {rec.task_id, segment_from_frames(rec.gt_labels).labels()});
    }
    return out;
}

}  // namespace

DetectionReport run_pipeline(const Dataset& dataset, const PipelineOptions& options) {
    const OccSplit split = build_occ_split(dataset.records);

    DetectionReport report;
    report.train_videos = static_cast<int>(split.train.size());
    report.test_videos = static_cast<int>(split.test.size());

    // Shared read-only state for the per-video anticipators.
    std::unique_ptr<TransitionMatrix> matrix;
    std::unique_ptr<NgramModel> ngram;
    std::map<std::string, std::vector<TranscriptExample>> transcripts;
    LatencyTracker latency;

    switch (options.anticipator) {
        case AnticipatorKind::Transition:
            matrix = std::make_unique<TransitionMatrix>(
                fit_transition_matrix(training_sequences(split.train), dataset.vocab));
            break;
        case AnticipatorKind::Ngram:
            ngram = std::make_unique<NgramModel>(
                NgramModel::fit(training_sequences(split.train), options.ngram_order));
            break;
        case AnticipatorKind::Llm:
            if (options.client == nullptr) {
                throw InvalidInputError("the llm anticipator needs a configured client");
            }
            transcripts = transcripts_by_task(split.train);
            break;
        case AnticipatorKind::Best:
        case AnticipatorKind::Worst:
        case AnticipatorKind::Random: break;
    }

    auto make_anticipator = [&](const VideoRecord& rec) -> std::unique_ptr<Anticipator> {
        switch (options.anticipator) {
            case AnticipatorKind::Transition:
                return std::make_unique<TransitionMatrixAnticipator>(*matrix);
            case AnticipatorKind::Ngram: return std::make_unique<NgramAnticipator>(*ngram);
            case AnticipatorKind::Llm:
                return std::make_unique<LlmAnticipator>(*options.client, dataset.vocab,
                                                        options.scheme, options.modality,
                                                        transcripts, options.context_cap,
                                                        &latency);
            case AnticipatorKind::Best:
                return std::make_unique<CornerCaseAnticipator>(CornerCase::Best,
                                                               dataset.vocab.size(), 0);
            case AnticipatorKind::Worst:
                return std::make_unique<CornerCaseAnticipator>(CornerCase::Worst,
                                                               dataset.vocab.size(), 0);
            case AnticipatorKind::Random:
                // Seed per video so results do not depend on scheduling.
                return std::make_unique<CornerCaseAnticipator>(
                    CornerCase::Random, dataset.vocab.size(),
                    options.seed ^ fnv1a64(rec.video_id));
        }
        throw InvalidInputError("unknown anticipator kind");
    };

    auto evaluate_video = [&](const VideoRecord& rec) {
        try {
            ProcedureResult result;
            result.video_id = rec.video_id;
            result.task_id = rec.task_id;

            const ActionSequence seq = smooth_and_collapse(rec.recognizer_labels, options.agg);
            DetectionContext ctx;
            ctx.task_id = rec.task_id;
            ctx.policy = options.policy;
            ctx.is_mistake_procedure = is_procedural_mistake(rec.annotation);

            const std::unique_ptr<Anticipator> anticipator = make_anticipator(rec);
            result.verdicts = detect_procedure(seq, *anticipator, ctx);
            result.sequence_counts = score_sequence_level(result.verdicts, rec.annotation);
            result.frame_counts =
                expand_verdicts_to_frames(result.verdicts, rec.gt_labels, rec.annotation);
            return result;
        } catch (const ClientError& e) {
            throw ClientError("video '" + rec.video_id + "': " + e.what());
        } catch (const ProtocolError& e) {
            throw ProtocolError("video '" + rec.video_id + "': " + e.what());
        } catch (const Error& e) {
            throw Error("video '" + rec.video_id + "': " + e.what());
        }
    };

    report.procedures.resize(split.test.size());
    const int jobs = std::max(1, options.jobs);
    if (jobs == 1 || split.test.size() <= 1) {
        for (std::size_t i = 0; i < split.test.size(); ++i) {
            report.procedures[i] = evaluate_video(split.test[i]);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        std::vector<std::exception_ptr> failures(static_cast<std::size_t>(jobs));
        for (int w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = next++; i < split.test.size(); i = next++) {
                        report.procedures[i] = evaluate_video(split.test[i]);
                    }
                } catch (...) {
                    failures[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (std::thread& t : workers) t.join();
        for (const std::exception_ptr& failure : failures) {
            if (failure) std::rethrow_exception(failure);
        }
    }

    for (const ProcedureResult& r : report.procedures) {
        report.sequence_total += r.sequence_counts;
        report.frame_total += r.frame_counts;
    }
    if (!latency.empty()) report.latency = latency.summarize();
    return report;
}

}  // namespace prego
