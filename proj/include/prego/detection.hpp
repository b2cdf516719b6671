// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "prego/aggregation.hpp"
#include "prego/anticipation.hpp"
#include "prego/dataset.hpp"
#include "prego/domain.hpp"
#include "prego/llm_client.hpp"
#include "prego/sequence_metrics.hpp"

namespace prego {

struct DetectionPolicy {
    // A step with no prediction at all counts as a mismatch. That is the
    // conservative one-class reading; turn it off to skip such steps.
    bool flag_on_no_prediction{true};
};

struct StepVerdict {
    int step_index{0};
    LabelId recognized{-1};
    AnticipatorVerdict anticipated;
    bool flagged_mistake{false};
    int span_start{0};
    int span_end{0};
};

struct DetectionContext {
    std::string task_id;
    DetectionPolicy policy;
    bool is_mistake_procedure{false};  // feeds the corner-case oracles only
};

// Walks the collapsed sequence in order; the anticipator only ever sees the
// strict prefix of steps before the one being classified.
std::vector<StepVerdict> detect_procedure(const ActionSequence& seq, Anticipator& anticipator,
                                          const DetectionContext& ctx);

// Sequence-level scoring: for a procedural-mistake video the final step is
// the positive (TP when flagged, FN otherwise) and every earlier step a
// negative; a correct video contributes only negatives.
ConfusionCounts score_sequence_level(const std::vector<StepVerdict>& verdicts,
                                     const MistakeAnnotation& annotation);

// Frame-level scoring: each step's flag is repeated over its frame span and
// compared against per-frame ground truth, where frames at and after the
// first mistake frame count as mistake frames.
ConfusionCounts expand_verdicts_to_frames(const std::vector<StepVerdict>& verdicts,
                                          const FrameStream& gt_stream,
                                          const MistakeAnnotation& annotation);

enum class AnticipatorKind { Transition, Ngram, Llm, Best, Worst, Random };
const char* anticipator_kind_name(AnticipatorKind k);

struct PipelineOptions {
    AggregationConfig agg;
    AnticipatorKind anticipator{AnticipatorKind::Transition};
    int ngram_order{2};
    PromptScheme scheme{PromptScheme::FewShot};
    Modality modality{Modality::Textual};
    int context_cap{5};
    DetectionPolicy policy;
    std::uint64_t seed{0};
    int jobs{1};
    LlmClient* client{nullptr};  // required when anticipator == Llm
};

struct ProcedureResult {
    std::string video_id;
    std::string task_id;
    std::vector<StepVerdict> verdicts;
    ConfusionCounts sequence_counts;
    ConfusionCounts frame_counts;
};

struct DetectionReport {
    int train_videos{0};
    int test_videos{0};
    std::vector<ProcedureResult> procedures;
    ConfusionCounts sequence_total;
    ConfusionCounts frame_total;
    std::map<std::string, LatencyTracker::Summary> latency;  // per scheme; llm runs only
};

// Split the dataset, fit the configured anticipator on the training half,
// then aggregate, detect and score every test video at both levels.
// Deterministic for a given seed, independent of the job count.
DetectionReport run_pipeline(const Dataset& dataset, const PipelineOptions& options);

// Everything needed to reproduce a run; embedded in every emitted report.
struct RunManifest {
    std::string artifact_version;
    std::string command_line;
    std::string timestamp;
    std::uint64_t seed{0};
    std::map<std::string, std::string> config;
};

std::string detection_report_to_json(const DetectionReport& report, const RunManifest& manifest);
std::string render_report_table(const DetectionReport& report);

}  // namespace prego
