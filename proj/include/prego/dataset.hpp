// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prego/domain.hpp"

namespace prego {

// One video: the recognizer's per-frame stream, the ground-truth stream,
// and the mistake annotation. Streams always have equal length and fps.
struct VideoRecord {
    std::string video_id;
    std::string task_id;
    double fps{30.0};
    FrameStream recognizer_labels;
    FrameStream gt_labels;
    MistakeAnnotation annotation;
    std::optional<std::string> split_hint;  // "train" | "test" when present

    int length() const { return gt_labels.length(); }
};

struct Dataset {
    ActionVocabulary vocab;
    std::vector<VideoRecord> records;
};

// Dataset files are JSONL (one video per line) with a sidecar vocabulary
// file. The default sidecar for "data.jsonl" is "data.vocab.json".
std::filesystem::path default_vocab_path(const std::filesystem::path& dataset_path);

Dataset load_dataset(const std::filesystem::path& dataset_path,
                     const std::filesystem::path& vocab_path);
Dataset load_dataset(const std::filesystem::path& dataset_path);

// Canonical field order, atomic replace. Loading what this wrote and saving
// again reproduces the bytes.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dataset_path,
                  const std::filesystem::path& vocab_path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dataset_path);

// Cut both streams so the video ends with the ground-truth step containing
// the first mistake frame.
VideoRecord trim_to_first_mistake(const VideoRecord& record);

struct OccSplit {
    std::vector<VideoRecord> train;
    std::vector<VideoRecord> test;  // trimmed to the first procedural mistake
};

// Correct procedures (including non-procedural annotation categories) go to
// the training set; procedural-mistake videos go to the test set, trimmed.
// A "train"/"test" split_hint overrides the rule for that video.
OccSplit build_occ_split(const std::vector<VideoRecord>& records);

struct TaskGrammar {
    std::string task_id;
    std::vector<std::vector<LabelId>> sequences;  // allowed step orders
};

enum class MistakeKind {
    SwapAdjacent,
    OmitStep,
    InsertForeign,
};

const char* mistake_kind_name(MistakeKind k);

struct SyntheticSpec {
    int vocab_size{10};
    std::vector<TaskGrammar> grammar;
    double mean_segment_frames{570.0};
    double segment_spread{120.0};
    double noise_rate{0.2};  // per-frame corruption probability, in [0, 1)
    MistakeKind mistake_kind{MistakeKind::SwapAdjacent};
    std::uint64_t seed{1};
    double fps{30.0};
};

void validate_spec(const SyntheticSpec& spec);
SyntheticSpec default_synthetic_spec();
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);

// Ground-truth streams are grammar samples with per-step durations; the
// recognizer stream corrupts each frame independently with probability
// noise_rate. Test videos carry one injected procedural mistake and a
// matching annotation. Identical seeds reproduce identical datasets.
Dataset generate_synthetic(const SyntheticSpec& spec, int n_train, int n_test);

}  // namespace prego
