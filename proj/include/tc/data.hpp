// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Feature-file I/O (the TCFT format), the synthetic complex-action
// generator, and the test-time temporal extent alteration transforms.

#ifndef TC_DATA_HPP
#define TC_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tc/rng.hpp"
#include "tc/tensor.hpp"

namespace tc {

// One sample: features [T, L, L, C] stored as f32 (the file precision) and a
// multi-hot label vector.
struct Sample {
    std::vector<float> features;
    std::vector<uint8_t> labels;  // K entries in {0,1}
};

struct FeatureDataset {
    int64_t t = 0, l = 0, c = 0, k = 0;
    int64_t frames_per_timestep = 1;
    uint64_t seed = 0;
    uint64_t generator_hash = 0;
    std::vector<Sample> samples;

    int64_t feature_size() const { return t * l * l * c; }

    // Batch [b0, b1) as [B, T, L, L, C] in the requested precision.
    template <class S>
    Tensor<S> batch_features(const std::vector<int64_t>& indices) const {
        const int64_t b = static_cast<int64_t>(indices.size());
        Tensor<S> x({b, t, l, l, c});
        for (int64_t i = 0; i < b; ++i) {
            const Sample& s = samples[static_cast<size_t>(indices[static_cast<size_t>(i)])];
            for (int64_t j = 0; j < feature_size(); ++j)
                x.data()[i * feature_size() + j] = static_cast<S>(s.features[static_cast<size_t>(j)]);
        }
        return x;
    }

    template <class S>
    Tensor<S> batch_labels(const std::vector<int64_t>& indices) const {
        const int64_t b = static_cast<int64_t>(indices.size());
        Tensor<S> y({b, k});
        for (int64_t i = 0; i < b; ++i) {
            const Sample& s = samples[static_cast<size_t>(indices[static_cast<size_t>(i)])];
            for (int64_t j = 0; j < k; ++j)
                y.data()[i * k + j] = static_cast<S>(s.labels[static_cast<size_t>(j)]);
        }
        return y;
    }

    uint64_t content_hash() const;
};

void write_features(const std::string& path, const FeatureDataset& dataset);
FeatureDataset read_features(const std::string& path);

// Expected byte size of the serialized form, for format checks.
int64_t tcft_file_size(int64_t n_samples, int64_t t, int64_t l, int64_t c, int64_t k);

// ---- synthetic complex actions ----

// One class worth of signal: a raised-cosine bump of nominal duration
// `duration` timesteps on a fixed channel subset, stretched per sample by a
// uniform scale in [scale_min, scale_max]. A class with `after >= 0` only
// fires (label 1) when the named class's motif starts earlier in the sample.
struct MotifSpec {
    std::vector<int64_t> channels;
    int64_t duration = 16;
    double amplitude = 1.0;
    double scale_min = 0.5;
    double scale_max = 2.0;
    int64_t after = -1;

    void validate(int64_t t, int64_t c) const;
};

struct SynthStats {
    std::vector<double> scales_drawn;
    std::vector<int64_t> scale_class;  // parallel to scales_drawn
    int64_t order_satisfied = 0;
    int64_t order_violated = 0;
};

uint64_t motif_spec_hash(const std::vector<MotifSpec>& motifs);

// Seed-deterministic generation: each sample places 2-5 motifs (an
// order-constrained class always brings its predecessor; start order is
// random), adds i.i.d. noise, and labels class k iff its motif is present
// and its order constraint holds. Samples with no positive label are
// redrawn.
FeatureDataset synth_generate(const std::vector<MotifSpec>& motifs, int64_t n_samples, int64_t t,
                              int64_t l, int64_t c, double noise_sigma, Rng& rng,
                              SynthStats* stats = nullptr);

// The default desk-scale task: classes come in pairs sharing a channel
// subset and separated only by temporal extent, plus order-constrained
// classes, so both multi-scale kernels and temporal order are informative.
std::vector<MotifSpec> default_motifs(int64_t K = 10, int64_t C = 64, int64_t T = 128);

// ---- temporal extent alteration (test-time only) ----

enum class Granularity { VeryCoarse, Coarse, Fine, VeryFine };

inline int64_t granularity_segments(Granularity g) {
    switch (g) {
        case Granularity::VeryCoarse: return 2;
        case Granularity::Coarse: return 4;
        case Granularity::Fine: return 8;
        case Granularity::VeryFine: return 16;
    }
    return 2;
}

std::string granularity_name(Granularity g);
Granularity granularity_from_name(const std::string& name);

enum class SegmentAction { Expand, Shrink, Keep };

struct AlterationSpec {
    Granularity granularity = Granularity::Coarse;
    uint64_t seed = 0;
};

// Per-segment budgets: segments are paired, one expands and its neighbour
// shrinks by the same amount, so total length is preserved.
std::vector<int64_t> alteration_budgets(int64_t t, int64_t segments, Rng& rng);

// Resample one feature tensor's time axis to the given per-segment budgets.
// Expansion repeats frames, shrinking drops uniformly-spaced frames; no new
// frame content is synthesized.
std::vector<float> alter_sample(const std::vector<float>& features, int64_t t, int64_t frame_size,
                                const std::vector<int64_t>& budgets);

FeatureDataset alter_extents(const FeatureDataset& dataset, const AlterationSpec& spec);

// Extent-randomized split: each sample is altered at a granularity drawn
// uniformly from the four levels. Seed-deterministic.
FeatureDataset randomize_extents(const FeatureDataset& dataset, uint64_t seed);

}  // namespace tc

#endif  // TC_DATA_HPP
