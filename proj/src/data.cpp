// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tc/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "tc/common.hpp"

namespace tc {

namespace {

constexpr char kMagic[4] = {'T', 'C', 'F', 'T'};
constexpr uint32_t kVersion = 1;
constexpr double kPi = 3.14159265358979323846;

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct Reader {
    const std::string& buf;
    size_t pos = 0;

    void need(size_t n, const char* what) {
        if (pos + n > buf.size())
            throw FormatError(std::string("TCFT: truncated while reading ") + what +
                              " at byte offset " + std::to_string(pos));
    }
    uint32_t u32(const char* what) {
        need(4, what);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64(const char* what) {
        need(8, what);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
};

uint64_t fnv1a(uint64_t h, const void* data, size_t n) {
    const auto* p = static_cast<const uint8_t*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

uint64_t FeatureDataset::content_hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    const uint64_t meta[6] = {static_cast<uint64_t>(t), static_cast<uint64_t>(l),
                              static_cast<uint64_t>(c), static_cast<uint64_t>(k),
                              static_cast<uint64_t>(frames_per_timestep), seed};
    h = fnv1a(h, meta, sizeof(meta));
    for (const Sample& s : samples) {
        h = fnv1a(h, s.labels.data(), s.labels.size());
        h = fnv1a(h, s.features.data(), s.features.size() * sizeof(float));
    }
    return h;
}

int64_t tcft_file_size(int64_t n_samples, int64_t t, int64_t l, int64_t c, int64_t k) {
    const int64_t header = 4 + 4 + 4 + 4 * 4 + 4 + 8 + 8;
    return header + n_samples * ((k + 7) / 8 + 4 * t * l * l * c);
}

void write_features(const std::string& path, const FeatureDataset& dataset) {
    std::string out;
    out.append(kMagic, 4);
    put_u32(out, kVersion);
    put_u32(out, static_cast<uint32_t>(dataset.samples.size()));
    put_u32(out, static_cast<uint32_t>(dataset.t));
    put_u32(out, static_cast<uint32_t>(dataset.l));
    put_u32(out, static_cast<uint32_t>(dataset.c));
    put_u32(out, static_cast<uint32_t>(dataset.k));
    put_u32(out, static_cast<uint32_t>(dataset.frames_per_timestep));
    put_u64(out, dataset.seed);
    put_u64(out, dataset.generator_hash);
    const int64_t label_bytes = (dataset.k + 7) / 8;
    for (const Sample& s : dataset.samples) {
        if (static_cast<int64_t>(s.labels.size()) != dataset.k ||
            static_cast<int64_t>(s.features.size()) != dataset.feature_size())
            throw ShapeError("write_features: sample dims do not match dataset metadata");
        std::vector<uint8_t> bitmap(static_cast<size_t>(label_bytes), 0);
        for (int64_t j = 0; j < dataset.k; ++j)
            if (s.labels[static_cast<size_t>(j)]) bitmap[static_cast<size_t>(j / 8)] |= uint8_t(1u << (j % 8));
        out.append(reinterpret_cast<const char*>(bitmap.data()), bitmap.size());
        out.append(reinterpret_cast<const char*>(s.features.data()), s.features.size() * sizeof(float));
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("write_features: cannot open " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw FormatError("write_features: write failed for " + path);
}

FeatureDataset read_features(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("read_features: cannot open " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    Reader r{buf};
    r.need(4, "magic");
    if (std::memcmp(buf.data(), kMagic, 4) != 0)
        throw FormatError("TCFT: bad magic at byte offset 0");
    r.pos = 4;
    const uint32_t version = r.u32("version");
    if (version != kVersion)
        throw FormatError("TCFT: unsupported version " + std::to_string(version) +
                          " at byte offset 4");
    FeatureDataset ds;
    const uint32_t n = r.u32("sample count");
    ds.t = r.u32("T");
    ds.l = r.u32("L");
    ds.c = r.u32("C");
    ds.k = r.u32("K");
    ds.frames_per_timestep = r.u32("frames per timestep");
    ds.seed = r.u64("seed");
    ds.generator_hash = r.u64("generator hash");
    const size_t label_bytes = static_cast<size_t>((ds.k + 7) / 8);
    const size_t feat_bytes = static_cast<size_t>(ds.feature_size()) * sizeof(float);
    ds.samples.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        Sample s;
        r.need(label_bytes, "label bitmap");
        s.labels.resize(static_cast<size_t>(ds.k));
        for (int64_t j = 0; j < ds.k; ++j)
            s.labels[static_cast<size_t>(j)] =
                (static_cast<uint8_t>(buf[r.pos + static_cast<size_t>(j / 8)]) >> (j % 8)) & 1u;
        r.pos += label_bytes;
        r.need(feat_bytes, "feature payload");
        s.features.resize(static_cast<size_t>(ds.feature_size()));
        std::memcpy(s.features.data(), buf.data() + r.pos, feat_bytes);
        r.pos += feat_bytes;
        ds.samples.push_back(std::move(s));
    }
    if (r.pos != buf.size())
        throw FormatError("TCFT: " + std::to_string(buf.size() - r.pos) +
                          " trailing bytes at byte offset " + std::to_string(r.pos));
    return ds;
}

// ---- synthetic generation ----

void MotifSpec::validate(int64_t t, int64_t c) const {
    if (channels.empty()) throw ConfigError("motif: empty channel subset");
    for (int64_t ch : channels)
        if (ch < 0 || ch >= c) throw ConfigError("motif: channel index out of range");
    if (duration < 2) throw ConfigError("motif: duration must be >= 2");
    if (scale_min < 0.25 || scale_max > 4.0 || scale_min > scale_max)
        throw ConfigError("motif: scale range must lie in [0.25, 4]");
    if (static_cast<double>(duration) * scale_max > static_cast<double>(t))
        throw ConfigError("motif: duration * scale_max exceeds T");
}

uint64_t motif_spec_hash(const std::vector<MotifSpec>& motifs) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (const MotifSpec& m : motifs) {
        h = fnv1a(h, m.channels.data(), m.channels.size() * sizeof(int64_t));
        const double fields[4] = {static_cast<double>(m.duration), m.amplitude, m.scale_min,
                                  m.scale_max};
        h = fnv1a(h, fields, sizeof(fields));
        h = fnv1a(h, &m.after, sizeof(m.after));
    }
    return h;
}

namespace {

// Raised-cosine bump, strictly positive on [0, dur).
double bump(int64_t i, int64_t dur) {
    return 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i + 1) /
                                 static_cast<double>(dur + 1)));
}

struct PlacedMotif {
    int64_t cls;
    int64_t start;
    int64_t dur;
};

}  // namespace

FeatureDataset synth_generate(const std::vector<MotifSpec>& motifs, int64_t n_samples, int64_t t,
                              int64_t l, int64_t c, double noise_sigma, Rng& rng,
                              SynthStats* stats) {
    const int64_t k = static_cast<int64_t>(motifs.size());
    if (k < 1) throw ConfigError("synth_generate: need at least one motif class");
    for (const MotifSpec& m : motifs) {
        m.validate(t, c);
        if (m.after >= k) throw ConfigError("synth_generate: order constraint names unknown class");
    }

    FeatureDataset ds;
    ds.t = t;
    ds.l = l;
    ds.c = c;
    ds.k = k;
    ds.generator_hash = motif_spec_hash(motifs);
    const int64_t spatial = l * l;

    for (int64_t si = 0; si < n_samples; ++si) {
        Sample sample;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100)
                throw ConfigError("synth_generate: could not draw a sample with a positive label");
            // Select motif classes; an order-constrained pick brings its
            // predecessor along and counts it toward the budget.
            const int64_t budget = std::min<int64_t>(k, 2 + static_cast<int64_t>(rng.uniform_int(4)));
            std::vector<int64_t> candidates(static_cast<size_t>(k));
            std::iota(candidates.begin(), candidates.end(), int64_t{0});
            for (int64_t i = k - 1; i > 0; --i)
                std::swap(candidates[static_cast<size_t>(i)],
                          candidates[static_cast<size_t>(rng.uniform_int(static_cast<uint64_t>(i + 1)))]);
            std::vector<bool> selected(static_cast<size_t>(k), false);
            int64_t n_sel = 0;
            for (int64_t cls : candidates) {
                if (n_sel >= budget) break;
                if (selected[static_cast<size_t>(cls)]) continue;
                const int64_t pred = motifs[static_cast<size_t>(cls)].after;
                if (pred >= 0 && !selected[static_cast<size_t>(pred)]) {
                    if (n_sel + 2 > budget) continue;
                    selected[static_cast<size_t>(pred)] = true;
                    ++n_sel;
                }
                selected[static_cast<size_t>(cls)] = true;
                ++n_sel;
            }

            // Place each selected motif: sample a duration scale then a start,
            // preferring starts that do not overlap earlier motifs. Order-
            // constrained motifs are placed adjacent to their predecessor
            // (complex actions chain their one-actions back to back), on a
            // random side so both label polarities occur.
            std::vector<PlacedMotif> placed;
            auto draw_dur = [&](const MotifSpec& m, int64_t cls) {
                for (int fit = 0;; ++fit) {
                    if (fit >= 100)
                        throw ConfigError("synth_generate: motif cannot fit after 100 rescales");
                    const double s = rng.uniform_range(m.scale_min, m.scale_max);
                    const int64_t dur =
                        std::max<int64_t>(2, std::llround(static_cast<double>(m.duration) * s));
                    if (dur <= t) {
                        if (stats) {
                            stats->scales_drawn.push_back(s);
                            stats->scale_class.push_back(cls);
                        }
                        return dur;
                    }
                }
            };
            auto placement_of = [&](int64_t cls) -> const PlacedMotif* {
                for (const PlacedMotif& p : placed)
                    if (p.cls == cls) return &p;
                return nullptr;
            };
            for (int pass = 0; pass < 2; ++pass) {
                for (int64_t cls = 0; cls < k; ++cls) {
                    if (!selected[static_cast<size_t>(cls)]) continue;
                    const MotifSpec& m = motifs[static_cast<size_t>(cls)];
                    const bool constrained = m.after >= 0;
                    if (constrained != (pass == 1)) continue;
                    const int64_t dur = draw_dur(m, cls);
                    int64_t start = 0;
                    if (constrained) {
                        const PlacedMotif* pred = placement_of(m.after);
                        const int64_t gap = static_cast<int64_t>(rng.uniform_int(4));
                        if (rng.uniform_int(2) == 0)
                            start = pred->start + pred->dur + gap;
                        else
                            start = pred->start - gap - dur;
                        start = std::min(std::max<int64_t>(start, 0), t - dur);
                    } else {
                        for (int place = 0; place < 20; ++place) {
                            start = static_cast<int64_t>(
                                rng.uniform_int(static_cast<uint64_t>(t - dur + 1)));
                            bool overlaps = false;
                            for (const PlacedMotif& p : placed)
                                if (start < p.start + p.dur && p.start < start + dur) overlaps = true;
                            if (!overlaps) break;
                        }
                    }
                    placed.push_back(PlacedMotif{cls, start, dur});
                }
            }

            // Labels: presence plus, for constrained classes, temporal order.
            sample.labels.assign(static_cast<size_t>(k), 0);
            auto start_of = [&](int64_t cls) -> int64_t {
                for (const PlacedMotif& p : placed)
                    if (p.cls == cls) return p.start;
                return -1;
            };
            for (const PlacedMotif& p : placed) {
                const int64_t pred = motifs[static_cast<size_t>(p.cls)].after;
                if (pred < 0) {
                    sample.labels[static_cast<size_t>(p.cls)] = 1;
                } else {
                    const int64_t pred_start = start_of(pred);
                    const bool ok = pred_start >= 0 && pred_start < p.start;
                    sample.labels[static_cast<size_t>(p.cls)] = ok ? 1 : 0;
                    if (stats) (ok ? stats->order_satisfied : stats->order_violated) += 1;
                }
            }
            bool any = false;
            for (uint8_t v : sample.labels) any = any || v;
            if (!any) continue;

            sample.features.assign(static_cast<size_t>(ds.feature_size()), 0.0f);
            for (const PlacedMotif& p : placed) {
                const MotifSpec& m = motifs[static_cast<size_t>(p.cls)];
                for (int64_t i = 0; i < p.dur; ++i) {
                    const float v = static_cast<float>(m.amplitude * bump(i, p.dur));
                    for (int64_t q = 0; q < spatial; ++q)
                        for (int64_t ch : m.channels)
                            sample.features[static_cast<size_t>(((p.start + i) * spatial + q) * c + ch)] += v;
                }
            }
            if (noise_sigma > 0.0)
                for (float& v : sample.features)
                    v += static_cast<float>(noise_sigma * rng.normal());
            break;
        }
        ds.samples.push_back(std::move(sample));
    }
    return ds;
}

std::vector<MotifSpec> default_motifs(int64_t K, int64_t C, int64_t T) {
    if (K < 2 || C < 6 * ((K + 1) / 2)) throw ConfigError("default_motifs: C too small for K classes");
    std::vector<MotifSpec> motifs;
    // Classes come in pairs sharing a channel subset; the pair members are
    // separated only by temporal extent (short vs long bump), so recognizing
    // them requires estimating duration, not just channel energy.
    for (int64_t cls = 0; cls < K; ++cls) {
        MotifSpec m;
        const int64_t pair = cls / 2;
        for (int64_t j = 0; j < 6; ++j) m.channels.push_back(pair * 6 + j);
        m.duration = (cls % 2 == 0) ? 6 : 24;
        m.amplitude = 1.0;
        m.scale_min = 0.75;
        m.scale_max = 1.5;
        motifs.push_back(std::move(m));
    }
    // With K >= 10 the last four classes become two order-constrained pairs.
    // Both members of a pair write to the same channels with different
    // durations, so "short then long" vs "long then short" is a short-range
    // asymmetric waveform (spanning roughly 11-23 timesteps) that only a
    // sufficiently wide temporal kernel can tell apart.
    if (K >= 10 && C >= 44) {
        for (int64_t cls = K - 4; cls < K; ++cls) {
            MotifSpec& m = motifs[static_cast<size_t>(cls)];
            const int64_t idx = cls - (K - 4);
            // one channel base per pair, inside a single group of the default
            // desk model (C=64, 4 groups)
            const int64_t base = idx < 2 ? 18 : 32;
            m.channels.clear();
            for (int64_t j = 0; j < 6; ++j) m.channels.push_back(base + j);
            m.duration = (idx % 2 == 0) ? 4 : 10;
            m.amplitude = 1.5;
            m.scale_min = 0.8;
            m.scale_max = 1.25;
        }
        motifs[static_cast<size_t>(K - 3)].after = K - 4;
        motifs[static_cast<size_t>(K - 1)].after = K - 2;
    }
    (void)T;
    return motifs;
}

// ---- alteration ----

std::string granularity_name(Granularity g) {
    switch (g) {
        case Granularity::VeryCoarse: return "very_coarse";
        case Granularity::Coarse: return "coarse";
        case Granularity::Fine: return "fine";
        case Granularity::VeryFine: return "very_fine";
    }
    return "?";
}

Granularity granularity_from_name(const std::string& name) {
    if (name == "very_coarse" || name == "a") return Granularity::VeryCoarse;
    if (name == "coarse" || name == "b") return Granularity::Coarse;
    if (name == "fine" || name == "c") return Granularity::Fine;
    if (name == "very_fine" || name == "d") return Granularity::VeryFine;
    throw ConfigError("unknown granularity: " + name);
}

std::vector<int64_t> alteration_budgets(int64_t t, int64_t segments, Rng& rng) {
    if (segments < 1 || t % segments != 0)
        throw ConfigError("alteration: segment count " + std::to_string(segments) +
                          " does not divide T=" + std::to_string(t));
    const int64_t seg_len = t / segments;
    std::vector<int64_t> budgets(static_cast<size_t>(segments), seg_len);
    // Pairs trade an equal budget: one expands, the neighbour shrinks.
    for (int64_t s = 0; s + 1 < segments; s += 2) {
        const uint64_t action = rng.uniform_int(3);
        if (action == 2) continue;  // keep both
        const int64_t delta = 1 + static_cast<int64_t>(rng.uniform_int(static_cast<uint64_t>(seg_len / 2)));
        if (action == 0) {
            budgets[static_cast<size_t>(s)] += delta;
            budgets[static_cast<size_t>(s + 1)] -= delta;
        } else {
            budgets[static_cast<size_t>(s)] -= delta;
            budgets[static_cast<size_t>(s + 1)] += delta;
        }
    }
    return budgets;
}

std::vector<float> alter_sample(const std::vector<float>& features, int64_t t, int64_t frame_size,
                                const std::vector<int64_t>& budgets) {
    const int64_t segments = static_cast<int64_t>(budgets.size());
    const int64_t seg_len = t / segments;
    int64_t total = 0;
    for (int64_t b : budgets) {
        if (b < 1) throw ConfigError("alteration: empty segment budget");
        total += b;
    }
    if (total != t) throw ConfigError("alteration: budgets do not preserve length");

    std::vector<float> out(features.size());
    int64_t out_t = 0;
    for (int64_t s = 0; s < segments; ++s) {
        const int64_t base = s * seg_len;
        const int64_t budget = budgets[static_cast<size_t>(s)];
        for (int64_t j = 0; j < budget; ++j) {
            const int64_t src = base + j * seg_len / budget;  // repeats or drops frames
            std::copy_n(features.begin() + src * frame_size, frame_size,
                        out.begin() + out_t * frame_size);
            ++out_t;
        }
    }
    return out;
}

FeatureDataset alter_extents(const FeatureDataset& dataset, const AlterationSpec& spec) {
    const int64_t segments = granularity_segments(spec.granularity);
    Rng rng(spec.seed);
    FeatureDataset out = dataset;
    const int64_t frame_size = dataset.l * dataset.l * dataset.c;
    for (Sample& s : out.samples) {
        const std::vector<int64_t> budgets = alteration_budgets(dataset.t, segments, rng);
        s.features = alter_sample(s.features, dataset.t, frame_size, budgets);
    }
    return out;
}

FeatureDataset randomize_extents(const FeatureDataset& dataset, uint64_t seed) {
    const Granularity grans[4] = {Granularity::VeryCoarse, Granularity::Coarse, Granularity::Fine,
                                  Granularity::VeryFine};
    Rng rng(seed);
    FeatureDataset out = dataset;
    const int64_t frame_size = dataset.l * dataset.l * dataset.c;
    for (Sample& s : out.samples) {
        const Granularity g = grans[rng.uniform_int(4)];
        const std::vector<int64_t> budgets =
            alteration_budgets(dataset.t, granularity_segments(g), rng);
        s.features = alter_sample(s.features, dataset.t, frame_size, budgets);
    }
    return out;
}

}  // namespace tc
