// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_METRICS_HPP
#define TC_METRICS_HPP

#include <cstdint>
#include <vector>

#include "tc/tensor.hpp"

namespace tc {

// Average precision: mean over positive ranks of precision-at-that-rank,
// scores sorted descending with ties broken by original index.
double average_precision(const std::vector<double>& scores, const std::vector<uint8_t>& labels);

struct MeanApResult {
    double map = 0.0;
    int64_t classes_evaluated = 0;
    int64_t classes_skipped = 0;  // classes with no positive label
};

// Unweighted mean of per-class APs over [n, K] score/label matrices.
// Classes without positives are excluded; all-empty input is an error.
MeanApResult mean_ap(const std::vector<std::vector<double>>& scores,
                     const std::vector<std::vector<uint8_t>>& labels);

// Multiclass top-1 accuracy.
double accuracy(const std::vector<std::vector<double>>& scores,
                const std::vector<std::vector<uint8_t>>& labels);

}  // namespace tc

#endif  // TC_METRICS_HPP
