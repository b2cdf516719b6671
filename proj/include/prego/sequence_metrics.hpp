// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>

#include "prego/domain.hpp"

namespace prego {

// Unit-cost edit distance between two label sequences. Empty inputs allowed.
std::size_t levenshtein_distance(std::span<const LabelId> a, std::span<const LabelId> b);

// 1 - distance / max(len(a), len(b)), in [0, 1].
// Two empty sequences compare as identical (similarity 1.0).
double levenshtein_similarity(std::span<const LabelId> a, std::span<const LabelId> b);

// Mistake is the positive class everywhere in this project.
struct ConfusionCounts {
    std::int64_t tp{0};
    std::int64_t fp{0};
    std::int64_t tn{0};
    std::int64_t fn{0};

    ConfusionCounts& operator+=(const ConfusionCounts& other) {
        tp += other.tp;
        fp += other.fp;
        tn += other.tn;
        fn += other.fn;
        return *this;
    }
    friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) {
        return a += b;
    }
    bool operator==(const ConfusionCounts&) const = default;
    std::int64_t total() const { return tp + fp + tn + fn; }
};

// Zero denominators yield 0.0 so corner-case baselines still produce
// finite tables.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1(const ConfusionCounts& c);

// Mean of true-positive rate and true-negative rate; a side with a zero
// denominator contributes 0.
double balanced_accuracy(const ConfusionCounts& c);

}  // namespace prego
