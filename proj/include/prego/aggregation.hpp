// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "prego/domain.hpp"

namespace prego {

enum class Strategy {
    NonOverlapping,  // mode per non-overlapping window, then dedupe
    TrailingWindow,  // stride-1 window ending at the current frame
    CenteredWindow,  // stride-1 window centered on the current frame
};

enum class TieBreak {
    SmallestLabelId,
    EarliestFirstOccurrence,
};

struct AggregationConfig {
    Strategy strategy{Strategy::NonOverlapping};
    int window_len{500};  // frames; 500 is a sensible default at 30 fps
    TieBreak tie_break{TieBreak::SmallestLabelId};
};

const char* strategy_name(Strategy s);
const char* tie_break_name(TieBreak t);

// Most frequent label in the slice; ties resolved per `tie_break`.
LabelId window_mode(std::span<const LabelId> labels, TieBreak tie_break);

// Strategy 1: partition the stream into consecutive windows of
// `cfg.window_len` frames (last one may be shorter), replace each window by
// its mode, then merge adjacent equal modes. Segment spans keep the original
// frame extents, so no frames are lost.
ActionSequence aggregate_nonoverlapping(const FrameStream& stream, const AggregationConfig& cfg);

// Strategy 2: smoothed stream where frame t becomes the mode over
// [max(0, t-l+1), t]. Windows shrink at the start; every mode reads the raw
// input labels, never previously smoothed output.
FrameStream aggregate_trailing(const FrameStream& stream, const AggregationConfig& cfg);

// Strategy 3: smoothed stream where frame t becomes the mode over
// [t-h, t+h] clipped to the stream, with h = floor(l/2). Boundary windows
// are truncated rather than padded.
FrameStream aggregate_centered(const FrameStream& stream, const AggregationConfig& cfg);

// Dispatch on cfg.strategy and collapse duplicates. For strategies 2/3 this
// is segment_from_frames over the smoothed stream.
ActionSequence smooth_and_collapse(const FrameStream& stream, const AggregationConfig& cfg);

}  // namespace prego
