// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "doctest.h"
#include "prego/detection.hpp"
#include "test_util.hpp"

using namespace prego;

namespace {

// Always agrees with the recognizer.
class YesAnticipator : public Anticipator {
public:
    AnticipatorVerdict anticipate(const AnticipationQuery& q) override {
        return AnticipatorVerdict::single(q.recognized);
    }
    const char* name() const override { return "yes"; }
};

// Returns a fixed verdict regardless of the query.
class FixedAnticipator : public Anticipator {
public:
    explicit FixedAnticipator(AnticipatorVerdict v) : verdict_(std::move(v)) {}
    AnticipatorVerdict anticipate(const AnticipationQuery&) override { return verdict_; }
    const char* name() const override { return "fixed"; }

private:
    AnticipatorVerdict verdict_;
};

// Records everything it was shown.
class SpyAnticipator : public Anticipator {
public:
    AnticipatorVerdict anticipate(const AnticipationQuery& q) override {
        histories.emplace_back(q.history.begin(), q.history.end());
        recognized.push_back(q.recognized);
        return AnticipatorVerdict::single(q.recognized);
    }
    const char* name() const override { return "spy"; }

    std::vector<std::vector<LabelId>> histories;
    std::vector<LabelId> recognized;
};

ActionSequence spans(std::vector<ActionSegment> segments) {
    ActionSequence seq;
    seq.collapsed = true;
    seq.segments = std::move(segments);
    return seq;
}

}  // namespace

TEST_CASE("detect_procedure flags exactly the mismatches") {
    const DetectionContext ctx{"task", {}, false};

    SUBCASE("an agreeing anticipator never flags") {
        YesAnticipator yes;
        const auto verdicts = detect_procedure(testutil::steps({0, 1, 2, 3}), yes, ctx);
        REQUIRE(verdicts.size() == 4);
        for (const StepVerdict& v : verdicts) CHECK(!v.flagged_mistake);
    }
    SUBCASE("allowed-set misses flag the step") {
        FixedAnticipator only_b(AnticipatorVerdict::allowed_set({1}));
        const auto verdicts = detect_procedure(testutil::steps({1, 2}), only_b, ctx);
        CHECK(!verdicts[0].flagged_mistake);  // observed 1, allowed {1}
        CHECK(verdicts[1].flagged_mistake);   // observed 2, allowed {1}
    }
    SUBCASE("no-prediction follows the policy") {
        FixedAnticipator silent(AnticipatorVerdict::none());
        const auto flagged = detect_procedure(testutil::steps({0}), silent, ctx);
        CHECK(flagged[0].flagged_mistake);

        DetectionContext lenient = ctx;
        lenient.policy.flag_on_no_prediction = false;
        const auto passed = detect_procedure(testutil::steps({0}), silent, lenient);
        CHECK(!passed[0].flagged_mistake);
    }
    SUBCASE("verdicts carry the segment spans") {
        YesAnticipator yes;
        const ActionSequence seq = spans({{4, 0, 10}, {2, 10, 25}});
        const auto verdicts = detect_procedure(seq, yes, ctx);
        CHECK(verdicts[0].span_start == 0);
        CHECK(verdicts[0].span_end == 10);
        CHECK(verdicts[1].span_start == 10);
        CHECK(verdicts[1].span_end == 25);
    }
    SUBCASE("uncollapsed sequences are rejected") {
        YesAnticipator yes;
        ActionSequence raw = spans({{4, 0, 10}, {4, 10, 25}});
        raw.collapsed = false;
        CHECK_THROWS_AS(detect_procedure(raw, yes, ctx), InvalidInputError);
    }
}

TEST_CASE("the anticipator only ever sees a strict prefix") {
    SpyAnticipator spy;
    const std::vector<LabelId> labels{3, 1, 4, 1, 5};
    detect_procedure(testutil::steps(labels), spy, {"task", {}, false});

    REQUIRE(spy.histories.size() == labels.size());
    for (std::size_t t = 0; t < labels.size(); ++t) {
        CHECK(spy.histories[t] ==
              std::vector<LabelId>(labels.begin(), labels.begin() + static_cast<int>(t)));
        CHECK(spy.recognized[t] == labels[t]);
    }
}

TEST_CASE("sequence-level scoring follows the final-step rule") {
    const MistakeAnnotation mistake{.first_mistake_frame = 3, .category = std::nullopt};
    const MistakeAnnotation correct{};

    auto verdicts_with_flags = [](std::vector<bool> flags) {
        std::vector<StepVerdict> out;
        for (std::size_t i = 0; i < flags.size(); ++i) {
            out.push_back({static_cast<int>(i), 0, AnticipatorVerdict::single(0), flags[i],
                           static_cast<int>(i), static_cast<int>(i) + 1});
        }
        return out;
    };

    SUBCASE("perfect detection") {
        const auto counts = score_sequence_level(verdicts_with_flags({false, false, false, true}),
                                                 mistake);
        CHECK(counts == ConfusionCounts{.tp = 1, .fp = 0, .tn = 3, .fn = 0});
    }
    SUBCASE("missed mistake") {
        const auto counts = score_sequence_level(verdicts_with_flags({false, false, false, false}),
                                                 mistake);
        CHECK(counts == ConfusionCounts{.tp = 0, .fp = 0, .tn = 3, .fn = 1});
    }
    SUBCASE("correct procedure with one false alarm") {
        const auto counts = score_sequence_level(
            verdicts_with_flags({false, true, false, false, false}), correct);
        CHECK(counts == ConfusionCounts{.tp = 0, .fp = 1, .tn = 4, .fn = 0});
    }
    SUBCASE("annotation beyond the evaluated steps is an error") {
        const MistakeAnnotation beyond{.first_mistake_frame = 99, .category = std::nullopt};
        CHECK_THROWS_AS(score_sequence_level(verdicts_with_flags({true, false}), beyond),
                        InvariantViolationError);
    }
    SUBCASE("counting identities") {
        const auto counts = score_sequence_level(verdicts_with_flags({true, false, true, true}),
                                                 mistake);
        CHECK(counts.tp + counts.fn == 1);   // one mistake procedure
        CHECK(counts.fp + counts.tn == 3);   // all earlier steps
    }
}

TEST_CASE("frame expansion compares step flags against per-frame truth") {
    const FrameStream gt = testutil::stream_of({0, 0, 0, 0, 1, 1});
    const MistakeAnnotation annotation{.first_mistake_frame = 4, .category = std::nullopt};

    SUBCASE("aligned spans with a correct flag give perfect counts") {
        std::vector<StepVerdict> verdicts{
            {0, 0, AnticipatorVerdict::single(0), false, 0, 4},
            {1, 1, AnticipatorVerdict::single(0), true, 4, 6},
        };
        const auto counts = expand_verdicts_to_frames(verdicts, gt, annotation);
        CHECK(counts == ConfusionCounts{.tp = 2, .fp = 0, .tn = 4, .fn = 0});
        CHECK(counts.total() == gt.length());
    }
    SUBCASE("one aggregated window mixing truth values cannot be scored cleanly") {
        // The single step covers four correct frames and two mistake frames;
        // whatever the flag, some frames score wrong.
        for (bool flag : {false, true}) {
            std::vector<StepVerdict> verdicts{
                {0, 0, AnticipatorVerdict::single(0), flag, 0, 6}};
            const auto counts = expand_verdicts_to_frames(verdicts, gt, annotation);
            CHECK(counts.total() == gt.length());
            CHECK(counts.fp + counts.fn > 0);
        }
    }
    SUBCASE("span gaps and length mismatches are errors") {
        std::vector<StepVerdict> gap{{0, 0, AnticipatorVerdict::single(0), false, 0, 3},
                                     {1, 0, AnticipatorVerdict::single(0), false, 4, 6}};
        CHECK_THROWS_AS(expand_verdicts_to_frames(gap, gt, annotation),
                        InvariantViolationError);

        std::vector<StepVerdict> short_cover{{0, 0, AnticipatorVerdict::single(0), false, 0, 5}};
        CHECK_THROWS_AS(expand_verdicts_to_frames(short_cover, gt, annotation),
                        InvariantViolationError);
    }
    SUBCASE("correct procedures make every frame a negative") {
        std::vector<StepVerdict> verdicts{{0, 0, AnticipatorVerdict::single(0), false, 0, 6}};
        const auto counts = expand_verdicts_to_frames(verdicts, gt, MistakeAnnotation{});
        CHECK(counts == ConfusionCounts{.tp = 0, .fp = 0, .tn = 6, .fn = 0});
    }
}

TEST_CASE("pipeline corner cases hit their bounds on synthetic data") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.noise_rate = 0.0;
    spec.mean_segment_frames = 20.0;
    spec.segment_spread = 5.0;
    spec.seed = 7;
    const Dataset ds = generate_synthetic(spec, 6, 4);

    PipelineOptions opt;
    opt.agg = {Strategy::NonOverlapping, 1, TieBreak::SmallestLabelId};

    SUBCASE("best case is perfect at sequence level") {
        opt.anticipator = AnticipatorKind::Best;
        const DetectionReport report = run_pipeline(ds, opt);
        CHECK(report.test_videos == 4);
        CHECK(precision(report.sequence_total) == 1.0);
        CHECK(recall(report.sequence_total) == 1.0);
        CHECK(f1(report.sequence_total) == 1.0);
        // With window 1 and clean streams the frame level is perfect too.
        CHECK(f1(report.frame_total) == 1.0);
    }
    SUBCASE("worst case is zero") {
        opt.anticipator = AnticipatorKind::Worst;
        const DetectionReport report = run_pipeline(ds, opt);
        CHECK(report.sequence_total.tp == 0);
        CHECK(report.sequence_total.tn == 0);
        CHECK(f1(report.sequence_total) == 0.0);
        CHECK(balanced_accuracy(report.sequence_total) == 0.0);
    }
    SUBCASE("random anticipator is reproducible and job-count independent") {
        opt.anticipator = AnticipatorKind::Random;
        opt.seed = 123;
        const RunManifest manifest{"v", "cmd", "t", 123, {}};
        const std::string a = detection_report_to_json(run_pipeline(ds, opt), manifest);
        opt.jobs = 3;
        const std::string b = detection_report_to_json(run_pipeline(ds, opt), manifest);
        CHECK(a == b);
    }
}

TEST_CASE("one-step memory catches unseen transitions and stays quiet on training data") {
    // One chain grammar per task; a swap always creates unseen transitions.
    SyntheticSpec spec;
    spec.vocab_size = 8;
    spec.grammar = {{"chain_a", {{0, 1, 2, 3, 4, 5}}}, {"chain_b", {{5, 4, 3, 2, 1, 0}}}};
    spec.noise_rate = 0.0;
    spec.mean_segment_frames = 12.0;
    spec.segment_spread = 3.0;
    spec.mistake_kind = MistakeKind::SwapAdjacent;
    spec.seed = 21;
    const Dataset ds = generate_synthetic(spec, 8, 6);

    PipelineOptions opt;
    opt.agg = {Strategy::NonOverlapping, 1, TieBreak::SmallestLabelId};
    opt.anticipator = AnticipatorKind::Transition;
    const DetectionReport report = run_pipeline(ds, opt);

    CHECK(report.test_videos == 6);
    CHECK(recall(report.sequence_total) == 1.0);

    // Replaying the training videos through the fitted matrix raises nothing.
    const OccSplit split = build_occ_split(ds.records);
    std::vector<ActionSequence> train_seqs;
    for (const VideoRecord& rec : split.train) {
        train_seqs.push_back(segment_from_frames(rec.gt_labels));
    }
    const TransitionMatrix matrix = fit_transition_matrix(train_seqs, ds.vocab);
    for (const VideoRecord& rec : split.train) {
        TransitionMatrixAnticipator anticipator(matrix);
        const auto verdicts =
            detect_procedure(segment_from_frames(rec.recognizer_labels), anticipator,
                             {rec.task_id, {}, false});
        for (const StepVerdict& v : verdicts) CHECK(!v.flagged_mistake);
    }
}

TEST_CASE("report counts stay consistent with their verdict lists") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.noise_rate = 0.05;
    spec.mean_segment_frames = 30.0;
    spec.seed = 31;
    const Dataset ds = generate_synthetic(spec, 5, 5);

    PipelineOptions opt;
    opt.agg = {Strategy::NonOverlapping, 10, TieBreak::SmallestLabelId};
    opt.anticipator = AnticipatorKind::Ngram;
    opt.ngram_order = 2;
    const DetectionReport report = run_pipeline(ds, opt);

    CHECK(report.latency.empty());  // no llm involved, no latency section

    ConfusionCounts seq_sum;
    ConfusionCounts frame_sum;
    for (const ProcedureResult& r : report.procedures) {
        seq_sum += r.sequence_counts;
        frame_sum += r.frame_counts;
        std::int64_t steps_flagged = 0;
        for (const StepVerdict& v : r.verdicts) steps_flagged += v.flagged_mistake ? 1 : 0;
        CHECK(r.sequence_counts.tp + r.sequence_counts.fp == steps_flagged);
        CHECK(r.sequence_counts.total() == static_cast<std::int64_t>(r.verdicts.size()));
        CHECK(r.frame_counts.total() == r.verdicts.back().span_end);
    }
    CHECK(seq_sum == report.sequence_total);
    CHECK(frame_sum == report.frame_total);
}
