// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "prego/dataset.hpp"
#include "prego/io_util.hpp"
#include "test_util.hpp"

using namespace prego;
namespace fs = std::filesystem;

namespace {

using testutil::TempDir;

void write_minimal_vocab(const fs::path& p, int size) {
    std::string labels;
    for (int i = 0; i < size; ++i) {
        if (i > 0) labels += ",";
        labels += R"({"id": )" + std::to_string(i) + R"(, "name": "act-)" + std::to_string(i) +
                  R"(", "verb": "act", "noun": ")" + std::to_string(i) + R"("})";
    }
    write_file_atomic(p, R"({"labels": [)" + labels + "]}\n");
}

}  // namespace

TEST_CASE("load_dataset reads a minimal file and rejects malformed ones") {
    TempDir dir;
    const fs::path data = dir.path / "data.jsonl";
    const fs::path vocab = dir.path / "data.vocab.json";
    write_minimal_vocab(vocab, 3);

    SUBCASE("one valid video") {
        write_file_atomic(data,
                          R"({"video_id": "v1", "task_id": "t", "fps": 30, "recognizer_labels": [0,1], "gt_labels": [0,1], "first_mistake_frame": null, "mistake_category": null})"
                          "\n");
        const Dataset ds = load_dataset(data);
        REQUIRE(ds.records.size() == 1);
        CHECK(ds.records[0].video_id == "v1");
        CHECK(ds.records[0].length() == 2);
        CHECK(!is_procedural_mistake(ds.records[0].annotation));
    }
    SUBCASE("mismatched stream lengths name the video") {
        write_file_atomic(data,
                          R"({"video_id": "broken", "task_id": "t", "fps": 30, "recognizer_labels": [0,1,2], "gt_labels": [0,1], "first_mistake_frame": null, "mistake_category": null})"
                          "\n");
        CHECK_THROWS_WITH_AS(load_dataset(data), doctest::Contains("broken"), LoadError);
    }
    SUBCASE("unknown category string") {
        write_file_atomic(data,
                          R"({"video_id": "v1", "task_id": "t", "fps": 30, "recognizer_labels": [0], "gt_labels": [0], "first_mistake_frame": 0, "mistake_category": "daydream"})"
                          "\n");
        CHECK_THROWS_AS(load_dataset(data), LoadError);
    }
    SUBCASE("unknown label") {
        write_file_atomic(data,
                          R"({"video_id": "v1", "task_id": "t", "fps": 30, "recognizer_labels": [0,9], "gt_labels": [0,1], "first_mistake_frame": null, "mistake_category": null})"
                          "\n");
        CHECK_THROWS_AS(load_dataset(data), LoadError);
    }
    SUBCASE("mistake frame outside the stream") {
        write_file_atomic(data,
                          R"({"video_id": "v1", "task_id": "t", "fps": 30, "recognizer_labels": [0,1], "gt_labels": [0,1], "first_mistake_frame": 7, "mistake_category": null})"
                          "\n");
        CHECK_THROWS_AS(load_dataset(data), LoadError);
    }
    SUBCASE("unknown field") {
        write_file_atomic(data,
                          R"({"video_id": "v1", "task_id": "t", "fps": 30, "recognizer_labels": [0], "gt_labels": [0], "surprise": 1})"
                          "\n");
        CHECK_THROWS_AS(load_dataset(data), LoadError);
    }
    SUBCASE("errors carry the line number") {
        write_file_atomic(data,
                          R"({"video_id": "good", "task_id": "t", "fps": 30, "recognizer_labels": [0], "gt_labels": [0], "first_mistake_frame": null, "mistake_category": null})"
                          "\n"
                          "{not json}\n");
        CHECK_THROWS_WITH_AS(load_dataset(data), doctest::Contains(":2:"), LoadError);
    }
}

TEST_CASE("save then load then save is byte-stable") {
    TempDir dir;
    const SyntheticSpec spec = default_synthetic_spec();
    const Dataset ds = generate_synthetic(spec, 4, 3);

    const fs::path first = dir.path / "a.jsonl";
    save_dataset(ds, first);
    const Dataset loaded = load_dataset(first);
    const fs::path second = dir.path / "b.jsonl";
    save_dataset(loaded, second);

    CHECK(read_file(first) == read_file(second));
    CHECK(read_file(default_vocab_path(first)) == read_file(default_vocab_path(second)));
}

TEST_CASE("occ split sends mistakes to test, trimmed") {
    const SyntheticSpec spec = default_synthetic_spec();
    Dataset ds = generate_synthetic(spec, 3, 2);
    REQUIRE(ds.records.size() == 5);

    const OccSplit split = build_occ_split(ds.records);
    CHECK(split.train.size() == 3);
    CHECK(split.test.size() == 2);

    for (const VideoRecord& rec : split.train) {
        CHECK(!is_procedural_mistake(rec.annotation));
    }
    for (std::size_t i = 0; i < split.test.size(); ++i) {
        const VideoRecord& rec = split.test[i];
        REQUIRE(rec.annotation.first_mistake_frame.has_value());
        // The final ground-truth step overlaps the first mistake frame.
        const ActionSequence steps = segment_from_frames(rec.gt_labels);
        const ActionSegment& last = steps.segments.back();
        const int f = *rec.annotation.first_mistake_frame;
        CHECK(f >= last.start);
        CHECK(f < last.end);
        CHECK(rec.recognizer_labels.length() == rec.gt_labels.length());
        CHECK(rec.length() <= ds.records[3 + i].length());  // trimming never grows
    }

    SUBCASE("non-procedural categories count as correct") {
        VideoRecord searched = ds.records[0];
        searched.video_id = "searcher";
        searched.annotation.first_mistake_frame = 1;
        searched.annotation.category = "search";
        const OccSplit with_search = build_occ_split({searched});
        CHECK(with_search.train.size() == 1);
        CHECK(with_search.test.empty());
    }
    SUBCASE("split hints override the occ rule") {
        VideoRecord hinted = ds.records[0];
        hinted.split_hint = "test";
        const OccSplit hinted_split = build_occ_split({hinted});
        CHECK(hinted_split.test.size() == 1);
    }
    SUBCASE("mistake at frame 0 keeps at least the first step") {
        VideoRecord rec = ds.records[0];
        rec.annotation.first_mistake_frame = 0;
        const VideoRecord trimmed = trim_to_first_mistake(rec);
        const ActionSequence steps = segment_from_frames(ds.records[0].gt_labels);
        CHECK(trimmed.length() == steps.segments.front().length());
        CHECK(trimmed.length() >= 1);
    }
}

TEST_CASE("synthetic generation is deterministic and honors the noise rate") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.noise_rate = 0.25;
    spec.seed = 99;

    const Dataset a = generate_synthetic(spec, 5, 5);
    const Dataset b = generate_synthetic(spec, 5, 5);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].video_id == b.records[i].video_id);
        CHECK(a.records[i].recognizer_labels.labels == b.records[i].recognizer_labels.labels);
        CHECK(a.records[i].gt_labels.labels == b.records[i].gt_labels.labels);
    }

    // Empirical corruption rate within 3 sigma of the binomial bound.
    std::int64_t corrupted = 0;
    std::int64_t total = 0;
    for (const VideoRecord& rec : a.records) {
        for (std::size_t f = 0; f < rec.gt_labels.labels.size(); ++f) {
            corrupted += rec.recognizer_labels.labels[f] != rec.gt_labels.labels[f] ? 1 : 0;
            ++total;
        }
    }
    const double p = spec.noise_rate;
    const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(total));
    const double observed = static_cast<double>(corrupted) / static_cast<double>(total);
    CHECK(observed > p - 3 * sigma);
    CHECK(observed < p + 3 * sigma);

    SUBCASE("zero noise copies the ground truth") {
        SyntheticSpec clean = default_synthetic_spec();
        clean.noise_rate = 0.0;
        const Dataset ds = generate_synthetic(clean, 2, 2);
        for (const VideoRecord& rec : ds.records) {
            CHECK(rec.recognizer_labels.labels == rec.gt_labels.labels);
        }
    }
}

TEST_CASE("mistake injection produces the advertised deviations") {
    SyntheticSpec spec = default_synthetic_spec();
    spec.noise_rate = 0.0;
    spec.segment_spread = 0.0;
    spec.mean_segment_frames = 10.0;

    SUBCASE("swap: first mistake sits where the order breaks") {
        spec.mistake_kind = MistakeKind::SwapAdjacent;
        const Dataset ds = generate_synthetic(spec, 0, 10);
        for (const VideoRecord& rec : ds.records) {
            REQUIRE(rec.annotation.first_mistake_frame.has_value());
            CHECK(*rec.annotation.category == "order");
            CHECK(*rec.annotation.first_mistake_frame % 10 == 0);  // step-aligned
        }
    }
    SUBCASE("omit: one step fewer than the grammar sequence") {
        spec.mistake_kind = MistakeKind::OmitStep;
        const Dataset ds = generate_synthetic(spec, 0, 10);
        for (const VideoRecord& rec : ds.records) {
            const ActionSequence steps = segment_from_frames(rec.gt_labels);
            CHECK(steps.size() == 9);  // default grammar sequences have 10 steps
            CHECK(*rec.annotation.category == "omit");
        }
    }
    SUBCASE("insert: one extra step") {
        spec.mistake_kind = MistakeKind::InsertForeign;
        const Dataset ds = generate_synthetic(spec, 0, 10);
        for (const VideoRecord& rec : ds.records) {
            const ActionSequence steps = segment_from_frames(rec.gt_labels);
            CHECK(steps.size() == 11);
            CHECK(*rec.annotation.category == "repeat");
        }
    }
}

TEST_CASE("spec validation rejects bad parameters") {
    SyntheticSpec spec = default_synthetic_spec();
    CHECK_NOTHROW(validate_spec(spec));
    CHECK(spec.mean_segment_frames == 570.0);  // 19 s per action at 30 fps
    CHECK(spec.fps == 30.0);

    SyntheticSpec bad_noise = spec;
    bad_noise.noise_rate = 1.0;
    CHECK_THROWS_AS(validate_spec(bad_noise), InvalidInputError);

    SyntheticSpec no_tasks = spec;
    no_tasks.grammar.clear();
    CHECK_THROWS_AS(validate_spec(no_tasks), InvalidInputError);

    SyntheticSpec bad_label = spec;
    bad_label.grammar[0].sequences[0][0] = 99;
    CHECK_THROWS_AS(validate_spec(bad_label), InvalidInputError);
}
