// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "tc/data.hpp"

using namespace tc;

namespace {

FeatureDataset tiny_dataset() {
    FeatureDataset ds;
    ds.t = 4;
    ds.l = 1;
    ds.c = 2;
    ds.k = 3;
    ds.frames_per_timestep = 8;
    ds.seed = 77;
    ds.generator_hash = 0xabcdef;
    for (int s = 0; s < 3; ++s) {
        Sample smp;
        for (int i = 0; i < 8; ++i) smp.features.push_back(0.25f * static_cast<float>(s * 8 + i));
        smp.labels = {static_cast<uint8_t>(s % 2), 1, 0};
        ds.samples.push_back(smp);
    }
    return ds;
}

}  // namespace

TEST_CASE("tcft: bitwise round trip") {
    auto ds = tiny_dataset();
    const std::string path = "/tmp/tckit_test_data.tcft";
    write_features(path, ds);
    auto back = read_features(path);
    CHECK(back.t == ds.t);
    CHECK(back.l == ds.l);
    CHECK(back.c == ds.c);
    CHECK(back.k == ds.k);
    CHECK(back.frames_per_timestep == ds.frames_per_timestep);
    CHECK(back.seed == ds.seed);
    CHECK(back.generator_hash == ds.generator_hash);
    REQUIRE(back.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(back.samples[i].features == ds.samples[i].features);
        CHECK(back.samples[i].labels == ds.samples[i].labels);
    }
    CHECK(back.content_hash() == ds.content_hash());
    std::remove(path.c_str());
}

TEST_CASE("tcft: empty dataset and file size formula") {
    auto ds = tiny_dataset();
    ds.samples.clear();
    const std::string path = "/tmp/tckit_test_empty.tcft";
    write_features(path, ds);
    auto back = read_features(path);
    CHECK(back.samples.empty());
    CHECK(back.k == 3);
    std::remove(path.c_str());

    auto full_ds = tiny_dataset();
    const std::string path2 = "/tmp/tckit_test_size.tcft";
    write_features(path2, full_ds);
    std::ifstream in(path2, std::ios::binary | std::ios::ate);
    CHECK(static_cast<int64_t>(in.tellg()) == tcft_file_size(3, 4, 1, 2, 3));
    in.close();
    std::remove(path2.c_str());
}

TEST_CASE("tcft: bad magic and truncation") {
    const std::string path = "/tmp/tckit_test_bad.tcft";
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE then some bytes to get past the header length";
    }
    CHECK_THROWS_AS(read_features(path), FormatError);
    auto ds = tiny_dataset();
    write_features(path, ds);
    // truncate mid-sample
    {
        std::ifstream in(path, std::ios::binary);
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<std::streamsize>(all.size() - 5));
    }
    try {
        read_features(path);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        // message carries a byte offset
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("synth: determinism") {
    auto motifs = default_motifs(10, 64, 128);
    Rng r1(5), r2(5), r3(6);
    auto d1 = synth_generate(motifs, 20, 128, 1, 64, 0.1, r1);
    auto d2 = synth_generate(motifs, 20, 128, 1, 64, 0.1, r2);
    auto d3 = synth_generate(motifs, 20, 128, 1, 64, 0.1, r3);
    CHECK(d1.content_hash() == d2.content_hash());
    CHECK(d1.content_hash() != d3.content_hash());
}

TEST_CASE("synth: no-noise sample equals template on its channels") {
    MotifSpec m;
    m.channels = {3, 4};
    m.duration = 16;
    m.amplitude = 1.0;
    m.scale_min = 1.0;
    m.scale_max = 1.0;
    Rng rng(9);
    auto ds = synth_generate({m}, 4, 64, 1, 8, 0.0, rng);
    for (const auto& s : ds.samples) {
        CHECK(s.labels[0] == 1);
        // off-motif channels exactly zero
        for (int64_t t = 0; t < 64; ++t)
            for (int64_t c = 0; c < 8; ++c)
                if (c != 3 && c != 4) CHECK(s.features[static_cast<size_t>(t * 8 + c)] == 0.0f);
        // on-motif channel is a raised-cosine bump: 16 positive values
        // peaking mid-bump, identical across the motif's channels
        int positive = 0;
        float peak = 0;
        for (int64_t t = 0; t < 64; ++t) {
            const float v = s.features[static_cast<size_t>(t * 8 + 3)];
            CHECK(v == s.features[static_cast<size_t>(t * 8 + 4)]);
            if (v > 0) ++positive;
            peak = std::max(peak, v);
        }
        CHECK(positive == 16);
        CHECK(peak > 0.9f);
        CHECK(peak <= 1.0f);
    }
}

TEST_CASE("synth: every sample has a positive label") {
    auto motifs = default_motifs(10, 64, 128);
    Rng rng(11);
    auto ds = synth_generate(motifs, 200, 128, 1, 64, 0.1, rng);
    for (const auto& s : ds.samples) {
        int pos = 0;
        for (uint8_t b : s.labels) pos += b;
        CHECK(pos >= 1);
    }
}

TEST_CASE("synth: label prevalence, order polarity, scale marginal") {
    auto motifs = default_motifs(10, 64, 128);
    Rng rng(13);
    SynthStats stats;
    auto ds = synth_generate(motifs, 1000, 128, 1, 64, 0.1, rng, &stats);
    REQUIRE(ds.samples.size() == 1000);
    for (int64_t k = 0; k < 10; ++k) {
        double prev = 0;
        for (const auto& s : ds.samples) prev += s.labels[static_cast<size_t>(k)];
        prev /= 1000.0;
        INFO("class ", k, " prevalence ", prev);
        CHECK(prev > 0.05);
        CHECK(prev < 0.8);
    }
    // both order polarities occur in at least 10% of constrained draws
    const double total = static_cast<double>(stats.order_satisfied + stats.order_violated);
    REQUIRE(total > 0);
    CHECK(stats.order_satisfied / total >= 0.1);
    CHECK(stats.order_violated / total >= 0.1);

    // duration-scale marginal roughly uniform per class: KS-style statistic
    // against the uniform CDF on that class's scale range
    REQUIRE(stats.scales_drawn.size() == stats.scale_class.size());
    for (int64_t cls = 0; cls < 10; ++cls) {
        std::vector<double> scales;
        for (size_t i = 0; i < stats.scales_drawn.size(); ++i)
            if (stats.scale_class[i] == cls) scales.push_back(stats.scales_drawn[i]);
        REQUIRE(scales.size() > 100);
        std::sort(scales.begin(), scales.end());
        const double lo = motifs[static_cast<size_t>(cls)].scale_min;
        const double hi = motifs[static_cast<size_t>(cls)].scale_max;
        double ks = 0;
        for (size_t i = 0; i < scales.size(); ++i) {
            const double emp = static_cast<double>(i + 1) / static_cast<double>(scales.size());
            const double uni = (scales[i] - lo) / (hi - lo);
            ks = std::max(ks, std::abs(emp - uni));
        }
        // 1.63/sqrt(n) is the 1% critical value; generous margin
        CHECK(ks < 2.0 / std::sqrt(static_cast<double>(scales.size())));
    }
}

TEST_CASE("motif validation") {
    MotifSpec m;
    m.channels = {0};
    m.duration = 40;
    m.scale_min = 0.2;  // below the floor
    m.scale_max = 2.0;
    CHECK_THROWS_AS(m.validate(128, 4), ConfigError);
    m.scale_min = 0.5;
    m.scale_max = 5.0;  // above the cap
    CHECK_THROWS_AS(m.validate(128, 4), ConfigError);
    m.scale_max = 4.0;  // 40 * 4 > 128
    CHECK_THROWS_AS(m.validate(128, 4), ConfigError);
    m.duration = 16;
    m.validate(128, 4);
    m.channels = {7};
    CHECK_THROWS_AS(m.validate(128, 4), ConfigError);
}

TEST_CASE("alteration: identity when every budget is kept") {
    auto ds = tiny_dataset();
    std::vector<int64_t> budgets = {2, 2};
    for (const auto& s : ds.samples) {
        auto out = alter_sample(s.features, 4, 2, budgets);
        CHECK(out == s.features);
    }
}

TEST_CASE("alteration: hand-traced expand/shrink (6,2) on T=8") {
    std::vector<float> x;
    for (int i = 0; i < 8; ++i) x.push_back(static_cast<float>(i) + 1.0f);  // frames 1..8
    auto out = alter_sample(x, 8, 1, {6, 2});
    REQUIRE(out.size() == 8);
    // first segment [1,2,3,4] expanded to 6 by repetition, in order
    for (int i = 0; i < 6; ++i) {
        CHECK(out[static_cast<size_t>(i)] >= 1.0f);
        CHECK(out[static_cast<size_t>(i)] <= 4.0f);
        if (i > 0) CHECK(out[static_cast<size_t>(i)] >= out[static_cast<size_t>(i - 1)]);
    }
    CHECK(out[0] == 1.0f);
    CHECK(out[1] == 1.0f);  // at least the first frame repeats
    // all four source frames survive expansion
    std::set<float> seen(out.begin(), out.begin() + 6);
    CHECK(seen == std::set<float>{1, 2, 3, 4});
    // second segment [5,6,7,8] shrunk to 2 by uniform dropping
    CHECK(out[6] == 5.0f);
    CHECK(out[7] == 7.0f);
}

TEST_CASE("alteration: budgets preserve total length") {
    Rng rng(17);
    for (int64_t segments : {2, 4, 8, 16}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto budgets = alteration_budgets(128, segments, rng);
            REQUIRE(static_cast<int64_t>(budgets.size()) == segments);
            int64_t total = 0;
            for (int64_t b : budgets) {
                CHECK(b >= 1);
                total += b;
            }
            CHECK(total == 128);
        }
    }
}

TEST_CASE("alteration: closure, label preservation, determinism") {
    auto motifs = default_motifs(10, 64, 128);
    Rng rng(19);
    auto ds = synth_generate(motifs, 10, 128, 1, 64, 0.1, rng);
    AlterationSpec spec;
    spec.granularity = Granularity::Fine;
    spec.seed = 3;
    auto alt1 = alter_extents(ds, spec);
    auto alt2 = alter_extents(ds, spec);
    CHECK(alt1.content_hash() == alt2.content_hash());
    CHECK(alt1.content_hash() != ds.content_hash());
    REQUIRE(alt1.samples.size() == ds.samples.size());
    for (size_t i = 0; i < ds.samples.size(); ++i) {
        CHECK(alt1.samples[i].labels == ds.samples[i].labels);
        CHECK(alt1.samples[i].features.size() == ds.samples[i].features.size());
        // no new frame content: every output frame appears among input frames
        std::set<std::vector<float>> input_frames;
        const int64_t fs = 64;
        for (int64_t t = 0; t < 128; ++t)
            input_frames.insert(std::vector<float>(
                ds.samples[i].features.begin() + t * fs,
                ds.samples[i].features.begin() + (t + 1) * fs));
        for (int64_t t = 0; t < 128; ++t)
            CHECK(input_frames.count(std::vector<float>(
                      alt1.samples[i].features.begin() + t * fs,
                      alt1.samples[i].features.begin() + (t + 1) * fs)) == 1);
    }

    AlterationSpec other = spec;
    other.seed = 4;
    CHECK(alter_extents(ds, other).content_hash() != alt1.content_hash());
}

TEST_CASE("granularity names") {
    CHECK(granularity_segments(Granularity::VeryCoarse) == 2);
    CHECK(granularity_segments(Granularity::Coarse) == 4);
    CHECK(granularity_segments(Granularity::Fine) == 8);
    CHECK(granularity_segments(Granularity::VeryFine) == 16);
    CHECK(granularity_from_name("a") == Granularity::VeryCoarse);
    CHECK(granularity_from_name("b") == Granularity::Coarse);
    CHECK(granularity_from_name("c") == Granularity::Fine);
    CHECK(granularity_from_name("d") == Granularity::VeryFine);
    CHECK(granularity_from_name("very_fine") == Granularity::VeryFine);
    CHECK(granularity_name(Granularity::Coarse) == "coarse");
    CHECK_THROWS_AS(granularity_from_name("z"), ConfigError);
}

TEST_CASE("alteration: segment count must divide T") {
    auto ds = tiny_dataset();  // T=4
    AlterationSpec spec;
    spec.granularity = Granularity::Fine;  // 8 segments > T=4
    CHECK_THROWS_AS(alter_extents(ds, spec), ConfigError);
}
