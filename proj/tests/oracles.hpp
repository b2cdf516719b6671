// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference implementations, written independently of the library
// code paths they check: direct recursion for edit distance and per-window
// recounting for the aggregation strategies.

#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "prego/aggregation.hpp"
#include "prego/domain.hpp"

namespace oracles {

using prego::LabelId;
using prego::TieBreak;

// Plain exponential recursion on the edit-distance recurrence. Only usable
// for short inputs; that is the point.
inline std::size_t lev_naive(std::span<const LabelId> a, std::span<const LabelId> b) {
    if (a.empty()) return b.size();
    if (b.empty()) return a.size();
    const std::size_t drop_a = lev_naive(a.subspan(1), b) + 1;
    const std::size_t drop_b = lev_naive(a, b.subspan(1)) + 1;
    const std::size_t keep = lev_naive(a.subspan(1), b.subspan(1)) + (a[0] != b[0] ? 1 : 0);
    return std::min({drop_a, drop_b, keep});
}

// Same recurrence, memoized top-down so longer pairs stay tractable.
class LevMemo {
public:
    std::size_t operator()(std::span<const LabelId> a, std::span<const LabelId> b) {
        a_ = a;
        b_ = b;
        memo_.assign((a.size() + 1) * (b.size() + 1), kUnset);
        return solve(0, 0);
    }

private:
    static constexpr std::size_t kUnset = static_cast<std::size_t>(-1);

    std::size_t solve(std::size_t i, std::size_t j) {
        std::size_t& slot = memo_[i * (b_.size() + 1) + j];
        if (slot != kUnset) return slot;
        if (i == a_.size()) return slot = b_.size() - j;
        if (j == b_.size()) return slot = a_.size() - i;
        const std::size_t del = solve(i + 1, j) + 1;
        const std::size_t ins = solve(i, j + 1) + 1;
        const std::size_t sub = solve(i + 1, j + 1) + (a_[i] != b_[j] ? 1 : 0);
        return slot = std::min({del, ins, sub});
    }

    std::span<const LabelId> a_;
    std::span<const LabelId> b_;
    std::vector<std::size_t> memo_;
};

// Frequency count through an ordered map, ties resolved by scanning.
inline LabelId mode_oracle(std::span<const LabelId> window, TieBreak tie_break) {
    std::map<LabelId, int> counts;
    for (LabelId l : window) ++counts[l];
    int best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    if (tie_break == TieBreak::SmallestLabelId) {
        for (const auto& [label, count] : counts) {
            if (count == best) return label;
        }
    }
    for (LabelId l : window) {
        if (counts[l] == best) return l;
    }
    return window.front();
}

struct OracleSegment {
    LabelId label;
    int start;
    int end;
    bool operator==(const OracleSegment&) const = default;
};

// Strategy 1, spelled out as three separate passes: chunk, mode, dedupe.
inline std::vector<OracleSegment> strategy1_oracle(const std::vector<LabelId>& labels, int l,
                                                   TieBreak tie_break) {
    const int total = static_cast<int>(labels.size());
    std::vector<OracleSegment> chunks;
    for (int start = 0; start < total; start += l) {
        const int end = std::min(start + l, total);
        std::span<const LabelId> window(labels.data() + start, static_cast<std::size_t>(end - start));
        chunks.push_back({mode_oracle(window, tie_break), start, end});
    }
    std::vector<OracleSegment> merged;
    for (const OracleSegment& c : chunks) {
        if (!merged.empty() && merged.back().label == c.label) {
            merged.back().end = c.end;
        } else {
            merged.push_back(c);
        }
    }
    return merged;
}

// Strategies 2 and 3 as per-frame full recounts.
inline std::vector<LabelId> trailing_oracle(const std::vector<LabelId>& labels, int l,
                                            TieBreak tie_break) {
    const int total = static_cast<int>(labels.size());
    std::vector<LabelId> out(labels.size());
    for (int t = 0; t < total; ++t) {
        const int start = std::max(0, t - l + 1);
        std::span<const LabelId> window(labels.data() + start, static_cast<std::size_t>(t - start + 1));
        out[static_cast<std::size_t>(t)] = mode_oracle(window, tie_break);
    }
    return out;
}

inline std::vector<LabelId> centered_oracle(const std::vector<LabelId>& labels, int l,
                                            TieBreak tie_break) {
    const int total = static_cast<int>(labels.size());
    const int h = l / 2;
    std::vector<LabelId> out(labels.size());
    for (int t = 0; t < total; ++t) {
        const int start = std::max(0, t - h);
        const int end = std::min(total - 1, t + h);
        std::span<const LabelId> window(labels.data() + start,
                                        static_cast<std::size_t>(end - start + 1));
        out[static_cast<std::size_t>(t)] = mode_oracle(window, tie_break);
    }
    return out;
}

}  // namespace oracles
