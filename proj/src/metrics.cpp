// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tc/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "tc/common.hpp"

namespace tc {

double average_precision(const std::vector<double>& scores, const std::vector<uint8_t>& labels) {
    if (scores.size() != labels.size()) throw ShapeError("average_precision: size mismatch");
    const size_t n = scores.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    double hits = 0.0, ap = 0.0;
    for (size_t rank = 0; rank < n; ++rank) {
        if (labels[order[rank]]) {
            hits += 1.0;
            ap += hits / static_cast<double>(rank + 1);
        }
    }
    if (hits == 0.0) throw Error("average_precision: no positive labels");
    return ap / hits;
}

MeanApResult mean_ap(const std::vector<std::vector<double>>& scores,
                     const std::vector<std::vector<uint8_t>>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw ShapeError("mean_ap: score/label matrices must be nonempty and aligned");
    const size_t n = scores.size();
    const size_t k = scores[0].size();
    MeanApResult result;
    double acc = 0.0;
    for (size_t cls = 0; cls < k; ++cls) {
        std::vector<double> s(n);
        std::vector<uint8_t> y(n);
        int64_t positives = 0;
        for (size_t i = 0; i < n; ++i) {
            s[i] = scores[i][cls];
            y[i] = labels[i][cls];
            positives += y[i];
        }
        if (positives == 0) {
            ++result.classes_skipped;
            continue;
        }
        acc += average_precision(s, y);
        ++result.classes_evaluated;
    }
    if (result.classes_evaluated == 0)
        throw Error("mean_ap: undefined metric, no class has a positive label");
    result.map = acc / static_cast<double>(result.classes_evaluated);
    return result;
}

double accuracy(const std::vector<std::vector<double>>& scores,
                const std::vector<std::vector<uint8_t>>& labels) {
    if (scores.size() != labels.size() || scores.empty())
        throw ShapeError("accuracy: size mismatch");
    int64_t correct = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        const size_t pred = static_cast<size_t>(
            std::max_element(scores[i].begin(), scores[i].end()) - scores[i].begin());
        correct += labels[i][pred] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(scores.size());
}

}  // namespace tc
