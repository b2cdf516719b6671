// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/aggregation.hpp"

#include <algorithm>
#include <vector>

namespace prego {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::NonOverlapping: return "nonoverlap";
        case Strategy::TrailingWindow: return "trailing";
        case Strategy::CenteredWindow: return "centered";
    }
    return "?";
}

const char* tie_break_name(TieBreak t) {
    switch (t) {
        case TieBreak::SmallestLabelId: return "smallest-id";
        case TieBreak::EarliestFirstOccurrence: return "earliest-occurrence";
    }
    return "?";
}

namespace {

void check_config(const AggregationConfig& cfg) {
    if (cfg.window_len < 1) {
        throw InvalidInputError("window length must be >= 1, got " +
                                std::to_string(cfg.window_len));
    }
}

void check_stream(const FrameStream& stream) {
    if (stream.labels.empty()) {
        throw InvalidInputError("cannot aggregate an empty frame stream");
    }
    for (LabelId l : stream.labels) {
        if (l < 0) throw InvalidInputError("negative label id in stream");
    }
}

// Incremental mode over a sliding window: label counts plus a lazily
// resolved argmax. Labels must be in [0, num_labels).
class SlidingMode {
public:
    explicit SlidingMode(int num_labels) : counts_(static_cast<std::size_t>(num_labels), 0) {}

    void add(LabelId l) { ++counts_[static_cast<std::size_t>(l)]; }
    void remove(LabelId l) { --counts_[static_cast<std::size_t>(l)]; }

    // `window` is the slice the counts currently describe; only consulted to
    // resolve ties under EarliestFirstOccurrence.
    LabelId mode(std::span<const LabelId> window, TieBreak tie_break) const {
        int best_count = 0;
        LabelId best = 0;
        int ties = 0;
        for (std::size_t id = 0; id < counts_.size(); ++id) {
            if (counts_[id] > best_count) {
                best_count = counts_[id];
                best = static_cast<LabelId>(id);
                ties = 1;
            } else if (counts_[id] == best_count && counts_[id] > 0) {
                ++ties;
            }
        }
        if (ties <= 1 || tie_break == TieBreak::SmallestLabelId) return best;
        for (LabelId l : window) {
            if (counts_[static_cast<std::size_t>(l)] == best_count) return l;
        }
        return best;
    }

private:
    std::vector<int> counts_;
};

int label_space(const FrameStream& stream) {
    LabelId max_label = 0;
    for (LabelId l : stream.labels) max_label = std::max(max_label, l);
    return max_label + 1;
}

}  // namespace

LabelId window_mode(std::span<const LabelId> labels, TieBreak tie_break) {
    if (labels.empty()) {
        throw InvalidInputError("mode of an empty window is undefined");
    }
    auto [min_it, max_it] = std::minmax_element(labels.begin(), labels.end());
    if (*min_it < 0) {
        throw InvalidInputError("negative label id in window");
    }
    SlidingMode counts(*max_it + 1);
    for (LabelId l : labels) counts.add(l);
    return counts.mode(labels, tie_break);
}

ActionSequence aggregate_nonoverlapping(const FrameStream& stream, const AggregationConfig& cfg) {
    check_config(cfg);
    check_stream(stream);

    const int total = stream.length();
    const int l = cfg.window_len;
    ActionSequence seq;
    seq.collapsed = true;

    for (int start = 0; start < total; start += l) {
        const int end = std::min(start + l, total);
        std::span<const LabelId> window(stream.labels.data() + start,
                                        static_cast<std::size_t>(end - start));
        const LabelId mode = window_mode(window, cfg.tie_break);
        if (!seq.segments.empty() && seq.segments.back().label == mode) {
            seq.segments.back().end = end;  // successive duplicate: extend
        } else {
            seq.segments.push_back({mode, start, end});
        }
    }
    return seq;
}

FrameStream aggregate_trailing(const FrameStream& stream, const AggregationConfig& cfg) {
    check_config(cfg);
    check_stream(stream);

    const int total = stream.length();
    const int l = cfg.window_len;
    FrameStream out{stream.video_id, stream.fps, {}};
    out.labels.resize(static_cast<std::size_t>(total));

    SlidingMode counts(label_space(stream));
    for (int t = 0; t < total; ++t) {
        counts.add(stream.labels[static_cast<std::size_t>(t)]);
        if (t - l >= 0) counts.remove(stream.labels[static_cast<std::size_t>(t - l)]);
        const int win_start = std::max(0, t - l + 1);
        std::span<const LabelId> window(stream.labels.data() + win_start,
                                        static_cast<std::size_t>(t - win_start + 1));
        out.labels[static_cast<std::size_t>(t)] = counts.mode(window, cfg.tie_break);
    }
    return out;
}

FrameStream aggregate_centered(const FrameStream& stream, const AggregationConfig& cfg) {
    check_config(cfg);
    check_stream(stream);

    const int total = stream.length();
    const int h = cfg.window_len / 2;
    FrameStream out{stream.video_id, stream.fps, {}};
    out.labels.resize(static_cast<std::size_t>(total));

    SlidingMode counts(label_space(stream));
    // Window for frame t is [t-h, t+h] clipped to [0, total).
    for (int i = 0; i <= std::min(h, total - 1); ++i) {
        counts.add(stream.labels[static_cast<std::size_t>(i)]);
    }
    for (int t = 0; t < total; ++t) {
        const int win_start = std::max(0, t - h);
        const int win_end = std::min(total - 1, t + h);
        std::span<const LabelId> window(stream.labels.data() + win_start,
                                        static_cast<std::size_t>(win_end - win_start + 1));
        out.labels[static_cast<std::size_t>(t)] = counts.mode(window, cfg.tie_break);
        // Slide to the window of t+1.
        if (t + h + 1 < total) counts.add(stream.labels[static_cast<std::size_t>(t + h + 1)]);
        if (t - h >= 0) counts.remove(stream.labels[static_cast<std::size_t>(t - h)]);
    }
    return out;
}

ActionSequence smooth_and_collapse(const FrameStream& stream, const AggregationConfig& cfg) {
    switch (cfg.strategy) {
        case Strategy::NonOverlapping: return aggregate_nonoverlapping(stream, cfg);
        case Strategy::TrailingWindow: return segment_from_frames(aggregate_trailing(stream, cfg));
        case Strategy::CenteredWindow: return segment_from_frames(aggregate_centered(stream, cfg));
    }
    throw InvalidInputError("unknown aggregation strategy");
}

}  // namespace prego
