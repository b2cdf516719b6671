// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "prego/domain.hpp"
#include "test_util.hpp"

using namespace prego;

TEST_CASE("vocabulary enforces dense ids and unique names") {
    CHECK_THROWS_AS(ActionVocabulary({{1, "a", "a", "a"}}), InvalidInputError);
    CHECK_THROWS_AS(ActionVocabulary({{0, "a", "a", "a"}, {1, "a", "a", "a"}}),
                    InvalidInputError);

    const ActionVocabulary vocab = testutil::small_vocab(5);
    CHECK(vocab.size() == 5);
    for (LabelId id = 0; id < vocab.size(); ++id) {
        CHECK(vocab.find(vocab.name(id)) == id);  // id -> name -> id round-trips
    }
    CHECK(!vocab.find("no-such-action").has_value());
    CHECK_THROWS_AS(vocab.entry(5), InvalidInputError);
}

TEST_CASE("segment_from_frames produces maximal runs") {
    const ActionSequence constant = segment_from_frames(testutil::stream_of({2, 2, 2}));
    REQUIRE(constant.size() == 1);
    CHECK(constant.segments[0].label == 2);
    CHECK(constant.segments[0].start == 0);
    CHECK(constant.segments[0].end == 3);

    const ActionSequence runs = segment_from_frames(testutil::stream_of({1, 1, 0, 0, 0, 1}));
    REQUIRE(runs.size() == 3);
    CHECK(runs.segments[0] == ActionSegment{1, 0, 2});
    CHECK(runs.segments[1] == ActionSegment{0, 2, 5});
    CHECK(runs.segments[2] == ActionSegment{1, 5, 6});
    CHECK(runs.collapsed);

    CHECK_THROWS_AS(segment_from_frames(testutil::stream_of({})), InvalidInputError);
}

TEST_CASE("flatten_to_frames repeats segment labels over their spans") {
    ActionSequence seq;
    seq.segments = {{1, 0, 2}, {0, 2, 5}};
    CHECK(flatten_to_frames(seq).labels == std::vector<LabelId>{1, 1, 0, 0, 0});

    ActionSequence single;
    single.segments = {{7, 0, 1}};
    CHECK(flatten_to_frames(single).labels == std::vector<LabelId>{7});

    ActionSequence gap;
    gap.segments = {{1, 0, 2}, {0, 3, 5}};
    CHECK_THROWS_AS(flatten_to_frames(gap), InvariantViolationError);
}

TEST_CASE("segment/flatten round-trips conserve streams and frame counts") {
    std::mt19937_64 rng(20260810);
    for (int trial = 0; trial < 200; ++trial) {
        const int length = 1 + static_cast<int>(rng() % 400);
        const int alphabet = 1 + static_cast<int>(rng() % 6);
        FrameStream stream = testutil::stream_of(testutil::random_labels(rng, length, alphabet));

        const ActionSequence seq = segment_from_frames(stream);
        CHECK(seq.total_frames() == stream.length());
        const FrameStream back = flatten_to_frames(seq, stream.video_id, stream.fps);
        CHECK(back.labels == stream.labels);

        // The converse direction: collapse(flatten(seq)) == seq.
        const ActionSequence again = segment_from_frames(back);
        CHECK(again.segments == seq.segments);
    }
}

TEST_CASE("sequence validation catches broken invariants") {
    ActionSequence not_contiguous;
    not_contiguous.segments = {{0, 0, 2}, {1, 3, 4}};
    CHECK_THROWS_AS(validate_sequence(not_contiguous), InvariantViolationError);

    ActionSequence fake_collapsed;
    fake_collapsed.collapsed = true;
    fake_collapsed.segments = {{0, 0, 2}, {0, 2, 4}};
    CHECK_THROWS_AS(validate_sequence(fake_collapsed), InvariantViolationError);

    ActionSequence empty_span;
    empty_span.segments = {{0, 0, 0}};
    CHECK_THROWS_AS(validate_sequence(empty_span), InvariantViolationError);
}

TEST_CASE("mistake categories split into procedural and not") {
    for (const char* c : {"order", "omit", "correction", "repeat"}) {
        CHECK(is_procedural_category(c));
        CHECK(is_known_category(c));
    }
    for (const char* c : {"slow", "search", "misuse", "motor", "failure"}) {
        CHECK(!is_procedural_category(c));
        CHECK(is_known_category(c));
    }
    CHECK(!is_known_category("daydreaming"));

    MistakeAnnotation none;
    CHECK(!is_procedural_mistake(none));
    MistakeAnnotation uncategorized{.first_mistake_frame = 3, .category = std::nullopt};
    CHECK(is_procedural_mistake(uncategorized));
    MistakeAnnotation search{.first_mistake_frame = 3, .category = "search"};
    CHECK(!is_procedural_mistake(search));
    MistakeAnnotation order{.first_mistake_frame = 3, .category = "order"};
    CHECK(is_procedural_mistake(order));
}

TEST_CASE("stream validation reports bad labels and fps") {
    const ActionVocabulary vocab = testutil::small_vocab(3);
    CHECK_NOTHROW(validate_stream(testutil::stream_of({0, 1, 2}), vocab));
    CHECK_THROWS_AS(validate_stream(testutil::stream_of({0, 3}), vocab), InvalidInputError);
    CHECK_THROWS_AS(validate_stream(testutil::stream_of({}), vocab), InvalidInputError);
    FrameStream bad_fps = testutil::stream_of({0});
    bad_fps.fps = 0.0;
    CHECK_THROWS_AS(validate_stream(bad_fps, vocab), InvalidInputError);
}
