// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The Timeception temporal convolution module and layer: channel groups,
// five-branch multi-scale temporal convolution per group, channel shuffle,
// temporal pooling, and the parameter accounting for the layer stack and
// the related temporal-layer variants.

#ifndef TC_TIMECEPTION_HPP
#define TC_TIMECEPTION_HPP

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tc/ops.hpp"
#include "tc/rng.hpp"

namespace tc {

enum class MultiScaleMode {
    MultiKernel,    // k in {3,5,7} convs (+ the k=1 pointwise branch), d = 1
    MultiDilation,  // k = 3, d in {1,2,3}
    Fixed,          // k = 3, d = 1
};

inline std::string mode_name(MultiScaleMode mode) {
    switch (mode) {
        case MultiScaleMode::MultiKernel: return "multi_kernel";
        case MultiScaleMode::MultiDilation: return "multi_dilation";
        case MultiScaleMode::Fixed: return "fixed";
    }
    return "?";
}

// The three explicit temporal-conv branches for a mode, as (k, d) pairs.
inline std::array<std::pair<int64_t, int64_t>, 3> conv_branches(MultiScaleMode mode) {
    switch (mode) {
        case MultiScaleMode::MultiKernel: return {{{3, 1}, {5, 1}, {7, 1}}};
        case MultiScaleMode::MultiDilation: return {{{3, 1}, {3, 2}, {3, 3}}};
        case MultiScaleMode::Fixed: return {{{3, 1}, {3, 1}, {3, 1}}};
    }
    return {{{3, 1}, {3, 1}, {3, 1}}};
}

struct TimeceptionConfig {
    int64_t num_layers = 4;
    int64_t groups = 8;     // N
    int64_t reduction = 4;  // M
    MultiScaleMode mode = MultiScaleMode::MultiKernel;
    int64_t input_channels = 1024;  // C0
    // < 0: the fixed interleave shuffle. >= 0: each layer uses a seeded
    // random channel permutation instead (ablation knob).
    int64_t shuffle_seed = -1;
};

// Channel recurrence across the stack: C' = 5 * floor(floor(C/N)/M) * N.
// Throws naming the offending layer when a width degenerates.
inline std::vector<int64_t> channel_trajectory(const TimeceptionConfig& cfg) {
    std::vector<int64_t> traj{cfg.input_channels};
    int64_t c = cfg.input_channels;
    for (int64_t layer = 0; layer < cfg.num_layers; ++layer) {
        if (c % cfg.groups != 0)
            throw ConfigError("timeception layer " + std::to_string(layer + 1) + ": groups " +
                              std::to_string(cfg.groups) + " do not divide C=" + std::to_string(c));
        const int64_t g = c / cfg.groups;
        const int64_t r = g / cfg.reduction;
        if (r < 1)
            throw ConfigError("timeception layer " + std::to_string(layer + 1) +
                              ": group width " + std::to_string(g) + " < reduction M=" +
                              std::to_string(cfg.reduction));
        c = 5 * r * cfg.groups;
        traj.push_back(c);
    }
    return traj;
}

// One trainable tensor plus its optimizer slot. `decay` marks tensors that
// receive weight decay (weights yes; biases and norm parameters no).
template <class S>
struct Param {
    std::string name;
    Tensor<S> value;
    Tensor<S> velocity;
    bool decay = true;

    Param() = default;
    Param(std::string n, Tensor<S> v, bool d)
        : name(std::move(n)), value(std::move(v)), velocity(zeros<S>(value.shape())), decay(d) {}
};

// Five pointwise reductions (one per branch) and three depthwise temporal
// kernels for one channel group.
template <class S>
struct GroupParams {
    std::array<Param<S>, 5> pw_w;
    std::array<Param<S>, 5> pw_b;
    std::array<Param<S>, 3> dw_w;
    std::array<Param<S>, 3> dw_b;
};

template <class S>
struct LayerParams {
    std::vector<GroupParams<S>> groups;
    Param<S> bn_gamma;
    Param<S> bn_beta;
    BatchNormState<S> bn_state;
    std::vector<int64_t> shuffle_perm;  // applied to the concatenated module outputs
    int64_t in_channels = 0;
    int64_t group_width = 0;    // g = C/N
    int64_t reduced_width = 0;  // r = floor(g/M)
};

template <class S>
struct Stack {
    TimeceptionConfig config;
    std::vector<LayerParams<S>> layers;
    std::vector<int64_t> trajectory;

    std::vector<Param<S>*> parameters() {
        std::vector<Param<S>*> out;
        for (auto& layer : layers) {
            for (auto& grp : layer.groups) {
                for (auto& p : grp.pw_w) out.push_back(&p);
                for (auto& p : grp.pw_b) out.push_back(&p);
                for (auto& p : grp.dw_w) out.push_back(&p);
                for (auto& p : grp.dw_b) out.push_back(&p);
            }
            out.push_back(&layer.bn_gamma);
            out.push_back(&layer.bn_beta);
        }
        return out;
    }
};

// Initialized parameters for every layer of the stack. Pointwise weights use
// normal(0, sqrt(2/fan_in)), depthwise kernels normal(0, sqrt(2/k)), biases
// zero, norm gamma one / beta zero.
template <class S>
Stack<S> build_stack(const TimeceptionConfig& cfg, Rng& rng) {
    Stack<S> stack;
    stack.config = cfg;
    stack.trajectory = channel_trajectory(cfg);
    const auto branches = conv_branches(cfg.mode);
    for (int64_t li = 0; li < cfg.num_layers; ++li) {
        const int64_t c = stack.trajectory[static_cast<size_t>(li)];
        const int64_t g = c / cfg.groups;
        const int64_t r = g / cfg.reduction;
        LayerParams<S> layer;
        layer.in_channels = c;
        layer.group_width = g;
        layer.reduced_width = r;
        const std::string prefix = "tc" + std::to_string(li + 1);
        for (int64_t n = 0; n < cfg.groups; ++n) {
            GroupParams<S> grp;
            const std::string gp = prefix + ".g" + std::to_string(n + 1);
            for (int64_t bi = 0; bi < 5; ++bi) {
                grp.pw_w[static_cast<size_t>(bi)] =
                    Param<S>(gp + ".pw" + std::to_string(bi + 1) + ".w",
                             randn<S>({g, r}, rng, std::sqrt(2.0 / static_cast<double>(g))), true);
                grp.pw_b[static_cast<size_t>(bi)] =
                    Param<S>(gp + ".pw" + std::to_string(bi + 1) + ".b", zeros<S>({r}), false);
            }
            for (size_t bi = 0; bi < 3; ++bi) {
                const int64_t k = branches[bi].first;
                grp.dw_w[bi] =
                    Param<S>(gp + ".dw" + std::to_string(bi + 1) + ".w",
                             randn<S>({k, r}, rng, std::sqrt(2.0 / static_cast<double>(k))), true);
                grp.dw_b[bi] = Param<S>(gp + ".dw" + std::to_string(bi + 1) + ".b", zeros<S>({r}), false);
            }
            layer.groups.push_back(std::move(grp));
        }
        const int64_t out_c = 5 * r * cfg.groups;
        if (cfg.shuffle_seed >= 0) {
            Rng perm_rng(static_cast<uint64_t>(cfg.shuffle_seed) + static_cast<uint64_t>(li));
            layer.shuffle_perm = random_permutation(out_c, perm_rng);
        } else {
            layer.shuffle_perm = shuffle_permutation(out_c, cfg.groups);
        }
        layer.bn_gamma = Param<S>(prefix + ".bn.gamma", full<S>({out_c}, S(1)), false);
        layer.bn_beta = Param<S>(prefix + ".bn.beta", zeros<S>({out_c}), false);
        layer.bn_state = BatchNormState<S>(out_c);
        stack.layers.push_back(std::move(layer));
    }
    return stack;
}

// Five-branch temporal convolution module on one group [B,T,H,W,g]:
// three pointwise->depthwise branches with the mode's (k,d), one
// pointwise->maxpool(k=2,s=1) branch, one pointwise-only branch; outputs
// concatenated to [B,T,H,W,5r].
template <class S>
Tensor<S> temporal_conv_module(Tape<S>* tape, const Tensor<S>& x_group, GroupParams<S>& params,
                               MultiScaleMode mode) {
    const auto branches = conv_branches(mode);
    std::vector<Tensor<S>> outs;
    outs.reserve(5);
    for (size_t bi = 0; bi < 3; ++bi) {
        Tensor<S> h = pointwise_conv(tape, x_group, params.pw_w[bi].value, params.pw_b[bi].value);
        ConvSpec spec{branches[bi].first, branches[bi].second, Padding::Same};
        outs.push_back(depthwise_temporal_conv(tape, h, params.dw_w[bi].value, params.dw_b[bi].value, spec));
    }
    Tensor<S> h4 = pointwise_conv(tape, x_group, params.pw_w[3].value, params.pw_b[3].value);
    outs.push_back(temporal_max_pool(tape, h4, PoolSpec{2, 1, Padding::Same}));
    outs.push_back(pointwise_conv(tape, x_group, params.pw_w[4].value, params.pw_b[4].value));
    return channel_concat(tape, outs);
}

// Full layer: split into N groups, per-group module, concat, shuffle,
// temporal max pool k=2 s=2, then norm + ReLU.
template <class S>
Tensor<S> timeception_layer(Tape<S>* tape, const Tensor<S>& x, LayerParams<S>& layer,
                            const TimeceptionConfig& cfg, NormMode norm_mode) {
    if (x.dim(1) < 2) throw ConfigError("timeception_layer: T must be >= 2");
    std::vector<Tensor<S>> groups = channel_split(tape, x, cfg.groups);
    std::vector<Tensor<S>> outs;
    outs.reserve(groups.size());
    for (size_t n = 0; n < groups.size(); ++n)
        outs.push_back(temporal_conv_module(tape, groups[n], layer.groups[n], cfg.mode));
    Tensor<S> y = channel_concat(tape, outs);
    y = channel_permute(tape, y, layer.shuffle_perm);
    y = temporal_max_pool(tape, y, PoolSpec{2, 2, Padding::Same});
    y = batch_norm(tape, y, layer.bn_gamma.value, layer.bn_beta.value, layer.bn_state, norm_mode);
    return relu(tape, y);
}

template <class S>
Tensor<S> forward_stack(Tape<S>* tape, const Tensor<S>& x, Stack<S>& stack, NormMode norm_mode) {
    Tensor<S> y = x;
    for (auto& layer : stack.layers) y = timeception_layer(tape, y, layer, stack.config, norm_mode);
    return y;
}

// ---- parameter accounting ----

struct HeadConfig {
    int64_t input_timesteps = 128;  // T0 fed to the first layer
    int64_t hidden = 512;           // classifier hidden width
    int64_t classes = 157;
};

struct ParamReport {
    struct LayerCount {
        int64_t pointwise = 0;
        int64_t depthwise = 0;
    };
    std::vector<LayerCount> layers;
    int64_t head_temporal_kernel = 0;
    int64_t head_classifier = 0;
    int64_t total = 0;
    std::string convention;

    int64_t stack_total() const {
        int64_t acc = 0;
        for (const auto& l : layers) acc += l.pointwise + l.depthwise;
        return acc;
    }

    std::string to_csv() const {
        std::ostringstream os;
        os << "section,pointwise,depthwise,count\n";
        for (size_t i = 0; i < layers.size(); ++i)
            os << "layer" << (i + 1) << "," << layers[i].pointwise << "," << layers[i].depthwise
               << "," << (layers[i].pointwise + layers[i].depthwise) << "\n";
        os << "head_temporal_kernel,,," << head_temporal_kernel << "\n";
        os << "head_classifier,,," << head_classifier << "\n";
        os << "total,,," << total << "\n";
        return os.str();
    }
};

inline constexpr const char* kCountingConvention =
    "weights only (biases and norm parameters excluded): per layer "
    "N*(5*g*r + r*sum(k_i)) for the pointwise and depthwise kernels, plus "
    "head T_f*C_f + C_f*H + H*K";

// Weight count from the config alone, no tensors instantiated.
inline ParamReport count_params(const TimeceptionConfig& cfg, const HeadConfig& head) {
    ParamReport report;
    report.convention = kCountingConvention;
    const auto branches = conv_branches(cfg.mode);
    int64_t sum_k = 0;
    for (const auto& [k, d] : branches) sum_k += k;
    const std::vector<int64_t> traj = channel_trajectory(cfg);
    for (int64_t li = 0; li < cfg.num_layers; ++li) {
        const int64_t g = traj[static_cast<size_t>(li)] / cfg.groups;
        const int64_t r = g / cfg.reduction;
        ParamReport::LayerCount lc;
        lc.pointwise = cfg.groups * 5 * g * r;
        lc.depthwise = cfg.groups * r * sum_k;
        report.layers.push_back(lc);
    }
    int64_t t_f = head.input_timesteps;
    for (int64_t li = 0; li < cfg.num_layers; ++li) t_f = (t_f + 1) / 2;
    const int64_t c_f = traj.back();
    report.head_temporal_kernel = t_f * c_f;
    report.head_classifier = c_f * head.hidden + head.hidden * head.classes;
    report.total = report.stack_total() + report.head_temporal_kernel + report.head_classifier;
    return report;
}

// ---- comparison temporal layers (parameter formulas only) ----

enum class TemporalLayerVariant {
    SeparableTC,      // temporal conv modeling T and C jointly: k*C*C per layer
    GroupedPointwise, // grouped depthwise (k*C) + pointwise (C*C)
    GroupedShuffle,   // grouped depthwise (k*C) + shuffle (0 params)
};

inline int64_t count_params_variant_layer(TemporalLayerVariant variant, int64_t c, int64_t k = 3) {
    switch (variant) {
        case TemporalLayerVariant::SeparableTC: return k * c * c;
        case TemporalLayerVariant::GroupedPointwise: return k * c + c * c;
        case TemporalLayerVariant::GroupedShuffle: return k * c;
    }
    return 0;
}

// Cumulative count across layers; widths held constant for this comparison.
inline int64_t count_params_variant(TemporalLayerVariant variant, int64_t c0, int64_t layers,
                                    int64_t k = 3) {
    return layers * count_params_variant_layer(variant, c0, k);
}

// Grouped temporal convolution with a joint in-group time-channel kernel
// (k * (C/N)^2 per group) followed by shuffling; group width matched to the
// Timeception grouping. Used for the width-matched growth comparison.
inline int64_t count_params_grouped_shuffle_matched(int64_t c0, int64_t layers, int64_t n_groups,
                                                    int64_t k = 3) {
    if (c0 % n_groups != 0) throw ConfigError("variant count: groups do not divide C");
    const int64_t g = c0 / n_groups;
    return layers * k * g * g * n_groups;
}

// ---- kernel dump ----

struct KernelDumpRow {
    int64_t layer;
    int64_t group;
    int64_t branch;
    int64_t kernel_size;
    int64_t dilation;
    int64_t weight_index;
    double value;
};

template <class S>
std::vector<KernelDumpRow> kernel_dump_rows(Stack<S>& stack) {
    std::vector<KernelDumpRow> rows;
    const auto branches = conv_branches(stack.config.mode);
    for (size_t li = 0; li < stack.layers.size(); ++li)
        for (size_t n = 0; n < stack.layers[li].groups.size(); ++n)
            for (size_t bi = 0; bi < 3; ++bi) {
                const Tensor<S>& w = stack.layers[li].groups[n].dw_w[bi].value;
                const int64_t k = w.dim(0), r = w.dim(1);
                // channel-major so the k taps of one kernel are consecutive
                for (int64_t ci = 0; ci < r; ++ci)
                    for (int64_t j = 0; j < k; ++j)
                        rows.push_back(KernelDumpRow{
                            static_cast<int64_t>(li + 1), static_cast<int64_t>(n + 1),
                            static_cast<int64_t>(bi + 1), branches[bi].first, branches[bi].second,
                            ci * k + j, static_cast<double>(w.at(j * r + ci))});
            }
    return rows;
}

std::string kernel_dump_csv(const std::vector<KernelDumpRow>& rows);
std::vector<KernelDumpRow> parse_kernel_dump_csv(const std::string& csv);

}  // namespace tc

#endif  // TC_TIMECEPTION_HPP
