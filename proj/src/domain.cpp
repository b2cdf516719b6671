// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/domain.hpp"

#include <array>
#include <string>

namespace prego {

ActionVocabulary::ActionVocabulary(std::vector<VocabEntry> entries)
    : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const VocabEntry& e = entries_[i];
        if (e.id != static_cast<LabelId>(i)) {
            throw InvalidInputError("vocabulary ids must be dense 0..C-1, got id " +
                                    std::to_string(e.id) + " at position " + std::to_string(i));
        }
        auto [it, inserted] = by_name_.emplace(e.name, e.id);
        if (!inserted) {
            throw InvalidInputError("duplicate vocabulary name: " + e.name);
        }
    }
}

const VocabEntry& ActionVocabulary::entry(LabelId id) const {
    if (!contains(id)) {
        throw InvalidInputError("label id " + std::to_string(id) + " outside vocabulary of size " +
                                std::to_string(size()));
    }
    return entries_[static_cast<std::size_t>(id)];
}

std::optional<LabelId> ActionVocabulary::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

void validate_stream(const FrameStream& stream, const ActionVocabulary& vocab) {
    if (stream.labels.empty()) {
        throw InvalidInputError("frame stream '" + stream.video_id + "' is empty");
    }
    if (!(stream.fps > 0.0)) {
        throw InvalidInputError("frame stream '" + stream.video_id + "' has non-positive fps");
    }
    for (std::size_t i = 0; i < stream.labels.size(); ++i) {
        if (!vocab.contains(stream.labels[i])) {
            throw InvalidInputError("frame stream '" + stream.video_id + "' frame " +
                                    std::to_string(i) + " carries unknown label " +
                                    std::to_string(stream.labels[i]));
        }
    }
}

std::vector<LabelId> ActionSequence::labels() const {
    std::vector<LabelId> out;
    out.reserve(segments.size());
    for (const ActionSegment& s : segments) out.push_back(s.label);
    return out;
}

void validate_sequence(const ActionSequence& seq) {
    int cursor = seq.segments.empty() ? 0 : seq.segments.front().start;
    for (std::size_t i = 0; i < seq.segments.size(); ++i) {
        const ActionSegment& s = seq.segments[i];
        if (s.start >= s.end) {
            throw InvariantViolationError("segment " + std::to_string(i) + " has empty span [" +
                                          std::to_string(s.start) + ", " + std::to_string(s.end) +
                                          ")");
        }
        if (s.start != cursor) {
            throw InvariantViolationError("segment " + std::to_string(i) + " starts at " +
                                          std::to_string(s.start) + ", expected " +
                                          std::to_string(cursor));
        }
        if (seq.collapsed && i > 0 && seq.segments[i - 1].label == s.label) {
            throw InvariantViolationError("collapsed sequence repeats label " +
                                          std::to_string(s.label) + " at segment " +
                                          std::to_string(i));
        }
        cursor = s.end;
    }
}

namespace {

constexpr std::array<std::string_view, 4> kProceduralCategories = {"order", "omit", "correction",
                                                                   "repeat"};
constexpr std::array<std::string_view, 5> kNonProceduralCategories = {"slow", "search", "misuse",
                                                                      "motor", "failure"};

}  // namespace

bool is_procedural_category(std::string_view category) {
    for (std::string_view c : kProceduralCategories) {
        if (c == category) return true;
    }
    return false;
}

bool is_known_category(std::string_view category) {
    if (is_procedural_category(category)) return true;
    for (std::string_view c : kNonProceduralCategories) {
        if (c == category) return true;
    }
    return false;
}

bool is_procedural_mistake(const MistakeAnnotation& annotation) {
    if (!annotation.first_mistake_frame.has_value()) return false;
    if (!annotation.category.has_value()) return true;
    return is_procedural_category(*annotation.category);
}

ActionSequence segment_from_frames(const FrameStream& stream) {
    if (stream.labels.empty()) {
        throw InvalidInputError("cannot segment an empty frame stream");
    }
    ActionSequence seq;
    seq.collapsed = true;
    int run_start = 0;
    for (int i = 1; i <= stream.length(); ++i) {
        if (i == stream.length() || stream.labels[i] != stream.labels[run_start]) {
            seq.segments.push_back({stream.labels[run_start], run_start, i});
            run_start = i;
        }
    }
    return seq;
}

FrameStream flatten_to_frames(const ActionSequence& seq, std::string video_id, double fps) {
    validate_sequence(seq);
    if (!seq.segments.empty() && seq.segments.front().start != 0) {
        throw InvariantViolationError("sequence does not start at frame 0");
    }
    FrameStream out;
    out.video_id = std::move(video_id);
    out.fps = fps;
    out.labels.reserve(static_cast<std::size_t>(seq.total_frames()));
    for (const ActionSegment& s : seq.segments) {
        out.labels.insert(out.labels.end(), static_cast<std::size_t>(s.length()), s.label);
    }
    return out;
}

}  // namespace prego
