// Copyright (C) 2026 The prego authors
// SPDX-License-Identifier: Apache-2.0

#include "prego/sequence_metrics.hpp"

#include <algorithm>
#include <vector>

namespace prego {

std::size_t levenshtein_distance(std::span<const LabelId> a, std::span<const LabelId> b) {
    if (a.size() > b.size()) std::swap(a, b);  // keep the rows short
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    if (n == 0) return m;

    std::vector<std::size_t> prev(n + 1);
    std::vector<std::size_t> cur(n + 1);
    for (std::size_t i = 0; i <= n; ++i) prev[i] = i;

    for (std::size_t j = 1; j <= m; ++j) {
        cur[0] = j;
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t del = prev[i] + 1;
            const std::size_t ins = cur[i - 1] + 1;
            const std::size_t sub = prev[i - 1] + (a[i - 1] != b[j - 1] ? 1 : 0);
            cur[i] = std::min({del, ins, sub});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

double levenshtein_similarity(std::span<const LabelId> a, std::span<const LabelId> b) {
    const std::size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    const std::size_t d = levenshtein_distance(a, b);
    return 1.0 - static_cast<double>(d) / static_cast<double>(longest);
}

namespace {

double ratio(std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1(const ConfusionCounts& c) {
    const double p = precision(c);
    const double r = recall(c);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double balanced_accuracy(const ConfusionCounts& c) {
    return 0.5 * (ratio(c.tp, c.tp + c.fn) + ratio(c.tn, c.tn + c.fp));
}

}  // namespace prego
