// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "prego/errors.hpp"

namespace prego {

using LabelId = int;

struct VocabEntry {
    LabelId id{};
    std::string name;
    std::string verb;
    std::string noun;
};

// The closed action set. Ids are dense (0..C-1) and names are unique, so
// id -> name -> id always round-trips.
class ActionVocabulary {
public:
    ActionVocabulary() = default;
    explicit ActionVocabulary(std::vector<VocabEntry> entries);

    int size() const { return static_cast<int>(entries_.size()); }
    bool contains(LabelId id) const { return id >= 0 && id < size(); }
    const VocabEntry& entry(LabelId id) const;
    const std::string& name(LabelId id) const { return entry(id).name; }
    std::optional<LabelId> find(std::string_view name) const;
    const std::vector<VocabEntry>& entries() const { return entries_; }

private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, LabelId> by_name_;
};

// Per-frame action labels for one video at a fixed frame rate. Either the
// recognizer's output or the ground truth, depending on which side of a
// VideoRecord the stream sits on.
struct FrameStream {
    std::string video_id;
    double fps{30.0};
    std::vector<LabelId> labels;

    int length() const { return static_cast<int>(labels.size()); }
};

void validate_stream(const FrameStream& stream, const ActionVocabulary& vocab);

// Half-open frame span [start, end) carrying one label.
struct ActionSegment {
    LabelId label{};
    int start{};
    int end{};

    int length() const { return end - start; }
    bool operator==(const ActionSegment&) const = default;
};

// Ordered, contiguous segments. When `collapsed` is set, adjacent segments
// carry different labels (successive duplicates were merged away).
struct ActionSequence {
    std::vector<ActionSegment> segments;
    bool collapsed{false};

    int size() const { return static_cast<int>(segments.size()); }
    bool empty() const { return segments.empty(); }
    int total_frames() const { return segments.empty() ? 0 : segments.back().end; }
    std::vector<LabelId> labels() const;
};

// Throws InvariantViolationError unless segments tile [first.start, last.end)
// back to back; also checks the collapsed flag against adjacent labels.
void validate_sequence(const ActionSequence& seq);

struct MistakeAnnotation {
    std::optional<int> first_mistake_frame;
    std::optional<std::string> category;
};

// The four categories that compromise a procedure. Everything else
// ("slow", "search", ...) is an annotation of style, not of order.
bool is_procedural_category(std::string_view category);
bool is_known_category(std::string_view category);
bool is_procedural_mistake(const MistakeAnnotation& annotation);

// Maximal runs of equal labels, as segments covering the whole stream.
ActionSequence segment_from_frames(const FrameStream& stream);

// Inverse of segment_from_frames: repeat each segment's label over its span.
FrameStream flatten_to_frames(const ActionSequence& seq, std::string video_id = {},
                              double fps = 30.0);

}  // namespace prego
