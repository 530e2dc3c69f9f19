// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable primitive ops. Every op is a pure function of its inputs
// (plus the explicit BatchNormState); passing a null tape runs forward-only.

#ifndef TC_OPS_HPP
#define TC_OPS_HPP

#include <cmath>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "tc/kernels.hpp"
#include "tc/tape.hpp"
#include "tc/tensor.hpp"

namespace tc {

enum class Padding { Same, Valid };

struct ConvSpec {
    int64_t kernel_size = 3;
    int64_t dilation = 1;
    Padding padding = Padding::Same;
};

struct PoolSpec {
    int64_t kernel_size = 2;
    int64_t stride = 1;
    Padding padding = Padding::Same;
};

namespace detail {

template <class S>
void check_finite(const Tensor<S>& t, const char* op) {
    if (debug_checks() && !t.all_finite())
        throw NumericError(std::string("non-finite value in output of ") + op);
}

inline bool want_grad(int64_t a) { return a >= 0; }
inline bool want_grad(int64_t a, int64_t b) { return a >= 0 || b >= 0; }
inline bool want_grad(int64_t a, int64_t b, int64_t c) { return a >= 0 || b >= 0 || c >= 0; }

// Feature tensors are [B, T, ..., C]; collapse the middle into Q.
template <class S>
void split_btqc(const Tensor<S>& x, int64_t& b, int64_t& t, int64_t& q, int64_t& c) {
    if (x.rank() < 3) throw ShapeError("expected rank >= 3 feature tensor, got " + shape_str(x.shape()));
    b = x.dim(0);
    t = x.dim(1);
    c = x.dim(x.rank() - 1);
    q = 1;
    for (int64_t i = 2; i < x.rank() - 1; ++i) q *= x.dim(i);
}

}  // namespace detail

// ---- elementwise ----

template <class S>
Tensor<S> add(Tape<S>* tape, const Tensor<S>& a, const Tensor<S>& b) {
    if (a.shape() != b.shape()) throw ShapeError("add: shape mismatch");
    Tensor<S> y(a.shape());
    for (int64_t i = 0; i < y.size(); ++i) y.data()[i] = a.data()[i] + b.data()[i];
    if (tape && detail::want_grad(a.id(), b.id()))
        tape->record({a.id(), b.id()}, y,
                     [](const Tensor<S>& g) { return std::vector<Tensor<S>>{g, g}; });
    return y;
}

template <class S>
Tensor<S> sub(Tape<S>* tape, const Tensor<S>& a, const Tensor<S>& b) {
    if (a.shape() != b.shape()) throw ShapeError("sub: shape mismatch");
    Tensor<S> y(a.shape());
    for (int64_t i = 0; i < y.size(); ++i) y.data()[i] = a.data()[i] - b.data()[i];
    if (tape && detail::want_grad(a.id(), b.id()))
        tape->record({a.id(), b.id()}, y, [](const Tensor<S>& g) {
            Tensor<S> neg(g.shape());
            for (int64_t i = 0; i < g.size(); ++i) neg.data()[i] = -g.data()[i];
            return std::vector<Tensor<S>>{g, neg};
        });
    return y;
}

template <class S>
Tensor<S> mul(Tape<S>* tape, const Tensor<S>& a, const Tensor<S>& b) {
    if (a.shape() != b.shape()) throw ShapeError("mul: shape mismatch");
    Tensor<S> y(a.shape());
    for (int64_t i = 0; i < y.size(); ++i) y.data()[i] = a.data()[i] * b.data()[i];
    if (tape && detail::want_grad(a.id(), b.id()))
        tape->record({a.id(), b.id()}, y, [a, b](const Tensor<S>& g) {
            Tensor<S> ga(a.shape()), gb(b.shape());
            for (int64_t i = 0; i < g.size(); ++i) {
                ga.data()[i] = g.data()[i] * b.data()[i];
                gb.data()[i] = g.data()[i] * a.data()[i];
            }
            return std::vector<Tensor<S>>{ga, gb};
        });
    return y;
}

template <class S>
Tensor<S> scale(Tape<S>* tape, const Tensor<S>& a, S factor) {
    Tensor<S> y(a.shape());
    for (int64_t i = 0; i < y.size(); ++i) y.data()[i] = a.data()[i] * factor;
    if (tape && detail::want_grad(a.id()))
        tape->record({a.id()}, y, [factor](const Tensor<S>& g) {
            Tensor<S> ga(g.shape());
            for (int64_t i = 0; i < g.size(); ++i) ga.data()[i] = g.data()[i] * factor;
            return std::vector<Tensor<S>>{ga};
        });
    return y;
}

template <class S>
Tensor<S> relu(Tape<S>* tape, const Tensor<S>& x) {
    Tensor<S> y(x.shape());
    for (int64_t i = 0; i < y.size(); ++i) y.data()[i] = x.data()[i] > S(0) ? x.data()[i] : S(0);
    if (tape && detail::want_grad(x.id()))
        tape->record({x.id()}, y, [x](const Tensor<S>& g) {
            Tensor<S> gx(x.shape());
            for (int64_t i = 0; i < g.size(); ++i)
                gx.data()[i] = x.data()[i] > S(0) ? g.data()[i] : S(0);
            return std::vector<Tensor<S>>{gx};
        });
    return y;
}

template <class S>
Tensor<S> sum(Tape<S>* tape, const Tensor<S>& x) {
    S acc = S(0);
    for (int64_t i = 0; i < x.size(); ++i) acc += x.data()[i];
    Tensor<S> y = full<S>({1}, acc);
    if (tape && detail::want_grad(x.id()))
        tape->record({x.id()}, y, [shape = x.shape()](const Tensor<S>& g) {
            return std::vector<Tensor<S>>{full<S>(shape, g.scalar())};
        });
    return y;
}

template <class S>
Tensor<S> reshape(Tape<S>* tape, const Tensor<S>& x, Shape shape) {
    Tensor<S> y = x.reshaped(std::move(shape));
    if (tape && detail::want_grad(x.id()))
        tape->record({x.id()}, y, [shape = x.shape()](const Tensor<S>& g) {
            return std::vector<Tensor<S>>{g.reshaped(shape)};
        });
    return y;
}

// ---- convolutions ----

// Per-channel temporal convolution, no cross-channel mixing.
// x: [B, T, ..., C], w: [k, C], b: [C].
template <class S>
Tensor<S> depthwise_temporal_conv(Tape<S>* tape, const Tensor<S>& x, const Tensor<S>& w,
                                  const Tensor<S>& b, const ConvSpec& spec) {
    int64_t bn, t, q, c;
    detail::split_btqc(x, bn, t, q, c);
    const int64_t k = spec.kernel_size;
    const int64_t d = spec.dilation;
    if (k < 1 || d < 1) throw ConfigError("depthwise_temporal_conv: kernel and dilation must be >= 1");
    if (k % 2 == 0 && spec.padding == Padding::Same)
        throw ConfigError("depthwise_temporal_conv: even kernel with `same` padding is unsupported");
    if (w.rank() != 2 || w.dim(0) != k || w.dim(1) != c)
        throw ShapeError("depthwise_temporal_conv: kernel shape " + shape_str(w.shape()) +
                         " does not match k=" + std::to_string(k) + ", C=" + std::to_string(c));
    if (b.size() != c) throw ShapeError("depthwise_temporal_conv: bias size mismatch");

    const int64_t field = (k - 1) * d + 1;
    kernels::ConvDims dims{bn, t, 0, q, c, k, d, 0};
    if (spec.padding == Padding::Same) {
        dims.t_out = t;
        dims.t_base = -((k - 1) / 2) * d;
    } else {
        if (field > t)
            throw ConfigError("depthwise_temporal_conv: receptive field " + std::to_string(field) +
                              " exceeds T=" + std::to_string(t) + " with `valid` padding");
        dims.t_out = t - (k - 1) * d;
        dims.t_base = 0;
    }

    Shape out_shape = x.shape();
    out_shape[1] = dims.t_out;
    Tensor<S> y(out_shape);
    kernels::depthwise_conv_fwd(x.data(), w.data(), b.data(), y.data(), dims);
    detail::check_finite(y, "depthwise_temporal_conv");

    if (tape && detail::want_grad(x.id(), w.id(), b.id()))
        tape->record({x.id(), w.id(), b.id()}, y, [x, w, b, dims](const Tensor<S>& g) {
            Tensor<S> gx(x.shape());
            kernels::depthwise_conv_bwd_x(g.data(), w.data(), gx.data(), dims);
            Tensor<S> gw(w.shape());
            kernels::depthwise_conv_bwd_w(g.data(), x.data(), gw.data(), dims);
            Tensor<S> gb(b.shape());
            kernels::channel_sum(g.data(), g.size() / dims.c, dims.c, gb.data());
            return std::vector<Tensor<S>>{gx, gw, gb};
        });
    return y;
}

// 1x1 convolution over the channel (last) axis. x: [..., Cin], w: [Cin, Cout].
template <class S>
Tensor<S> pointwise_conv(Tape<S>* tape, const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
    if (w.rank() != 2) throw ShapeError("pointwise_conv: weight must be [C_in, C_out]");
    const int64_t ci = w.dim(0);
    const int64_t co = w.dim(1);
    if (x.dim(x.rank() - 1) != ci)
        throw ShapeError("pointwise_conv: input channels " + std::to_string(x.dim(x.rank() - 1)) +
                         " != weight C_in " + std::to_string(ci));
    if (b.size() != co) throw ShapeError("pointwise_conv: bias size mismatch");
    const int64_t rows = x.size() / ci;

    Shape out_shape = x.shape();
    out_shape.back() = co;
    Tensor<S> y(out_shape);
    kernels::matmul_bias(x.data(), w.data(), b.data(), y.data(), rows, ci, co);
    detail::check_finite(y, "pointwise_conv");

    if (tape && detail::want_grad(x.id(), w.id(), b.id()))
        tape->record({x.id(), w.id(), b.id()}, y, [x, w, b, rows, ci, co](const Tensor<S>& g) {
            Tensor<S> gx(x.shape());
            kernels::matmul_bwd_x(g.data(), w.data(), gx.data(), rows, ci, co);
            Tensor<S> gw(w.shape());
            kernels::matmul_bwd_w(g.data(), x.data(), gw.data(), rows, ci, co);
            Tensor<S> gb(b.shape());
            kernels::channel_sum(g.data(), rows, co, gb.data());
            return std::vector<Tensor<S>>{gx, gw, gb};
        });
    return y;
}

// Affine map on [B, F]; same math as pointwise_conv.
template <class S>
Tensor<S> dense(Tape<S>* tape, const Tensor<S>& x, const Tensor<S>& w, const Tensor<S>& b) {
    if (x.rank() != 2) throw ShapeError("dense: input must be [B, F]");
    return pointwise_conv(tape, x, w, b);
}

// ---- pooling ----

template <class S>
Tensor<S> temporal_max_pool(Tape<S>* tape, const Tensor<S>& x, const PoolSpec& spec) {
    int64_t bn, t, q, c;
    detail::split_btqc(x, bn, t, q, c);
    const int64_t k = spec.kernel_size;
    const int64_t s = spec.stride;
    if (k < 1 || s < 1) throw ConfigError("temporal_max_pool: kernel and stride must be >= 1");
    kernels::PoolDims dims{bn, t, 0, q, c, k, s};
    if (spec.padding == Padding::Same) {
        dims.t_out = (t + s - 1) / s;
    } else {
        if (k > t)
            throw ConfigError("temporal_max_pool: kernel " + std::to_string(k) + " exceeds T=" +
                              std::to_string(t) + " with `valid` padding");
        dims.t_out = (t - k) / s + 1;
    }

    Shape out_shape = x.shape();
    out_shape[1] = dims.t_out;
    Tensor<S> y(out_shape);
    auto argmax = std::make_shared<std::vector<int32_t>>(static_cast<size_t>(y.size()));
    kernels::maxpool_fwd(x.data(), y.data(), argmax->data(), dims);

    if (tape && detail::want_grad(x.id()))
        tape->record({x.id()}, y, [shape = x.shape(), argmax, dims](const Tensor<S>& g) {
            Tensor<S> gx(shape);
            kernels::maxpool_bwd(g.data(), argmax->data(), gx.data(), dims);
            return std::vector<Tensor<S>>{gx};
        });
    return y;
}

// Mean over the spatial axes: [B, T, H, W, C] -> [B, T, C].
template <class S>
Tensor<S> spatial_avg_pool(Tape<S>* tape, const Tensor<S>& x) {
    if (x.rank() != 5) throw ShapeError("spatial_avg_pool: expected [B,T,H,W,C]");
    const int64_t b = x.dim(0), t = x.dim(1), hw = x.dim(2) * x.dim(3), c = x.dim(4);
    Tensor<S> y({b, t, c});
    const S inv = S(1) / static_cast<S>(hw);
    for (int64_t bt = 0; bt < b * t; ++bt)
        for (int64_t ci = 0; ci < c; ++ci) {
            S acc = S(0);
            for (int64_t q = 0; q < hw; ++q) acc += x.data()[(bt * hw + q) * c + ci];
            y.data()[bt * c + ci] = acc * inv;
        }
    if (tape && detail::want_grad(x.id()))
        tape->record({x.id()}, y, [shape = x.shape(), b, t, hw, c, inv](const Tensor<S>& g) {
            Tensor<S> gx(shape);
            for (int64_t bt = 0; bt < b * t; ++bt)
                for (int64_t q = 0; q < hw; ++q)
                    for (int64_t ci = 0; ci < c; ++ci)
                        gx.data()[(bt * hw + q) * c + ci] = g.data()[bt * c + ci] * inv;
            return std::vector<Tensor<S>>{gx};
        });
    return y;
}

// ---- channel grouping ----

namespace detail {

// Gather along the last axis: y[..., j] = x[..., perm[j]].
template <class S>
Tensor<S> channel_gather(const Tensor<S>& x, const std::vector<int64_t>& perm, int64_t c_out) {
    const int64_t c_in = x.dim(x.rank() - 1);
    Shape out_shape = x.shape();
    out_shape.back() = c_out;
    Tensor<S> y(out_shape);
    const int64_t rows = x.size() / c_in;
    for (int64_t r = 0; r < rows; ++r)
        for (int64_t j = 0; j < c_out; ++j)
            y.data()[r * c_out + j] = x.data()[r * c_in + perm[j]];
    return y;
}

}  // namespace detail

template <class S>
std::vector<Tensor<S>> channel_split(Tape<S>* tape, const Tensor<S>& x, int64_t n_groups) {
    const int64_t c = x.dim(x.rank() - 1);
    if (n_groups < 1 || c % n_groups != 0)
        throw ConfigError("channel_split: groups " + std::to_string(n_groups) +
                          " do not divide C=" + std::to_string(c));
    const int64_t g = c / n_groups;
    std::vector<Tensor<S>> out;
    out.reserve(static_cast<size_t>(n_groups));
    for (int64_t n = 0; n < n_groups; ++n) {
        std::vector<int64_t> idx(static_cast<size_t>(g));
        for (int64_t j = 0; j < g; ++j) idx[static_cast<size_t>(j)] = n * g + j;
        Tensor<S> y = detail::channel_gather(x, idx, g);
        if (tape && detail::want_grad(x.id()))
            tape->record({x.id()}, y, [shape = x.shape(), c, g, n](const Tensor<S>& gy) {
                Tensor<S> gx(shape);
                const int64_t rows = gx.size() / c;
                for (int64_t r = 0; r < rows; ++r)
                    for (int64_t j = 0; j < g; ++j)
                        gx.data()[r * c + n * g + j] = gy.data()[r * g + j];
                return std::vector<Tensor<S>>{gx};
            });
        out.push_back(std::move(y));
    }
    return out;
}

template <class S>
Tensor<S> channel_concat(Tape<S>* tape, const std::vector<Tensor<S>>& parts) {
    if (parts.empty()) throw ShapeError("channel_concat: empty list");
    Shape base = parts[0].shape();
    int64_t c_total = 0;
    for (const auto& p : parts) {
        Shape s = p.shape();
        if (s.size() != base.size()) throw ShapeError("channel_concat: rank mismatch");
        for (size_t i = 0; i + 1 < s.size(); ++i)
            if (s[i] != base[i]) throw ShapeError("channel_concat: non-channel extent mismatch");
        c_total += s.back();
    }
    Shape out_shape = base;
    out_shape.back() = c_total;
    Tensor<S> y(out_shape);
    const int64_t rows = y.size() / c_total;
    int64_t offset = 0;
    std::vector<int64_t> in_ids;
    std::vector<int64_t> widths;
    bool any_grad = false;
    for (const auto& p : parts) {
        const int64_t w = p.dim(p.rank() - 1);
        for (int64_t r = 0; r < rows; ++r)
            for (int64_t j = 0; j < w; ++j)
                y.data()[r * c_total + offset + j] = p.data()[r * w + j];
        in_ids.push_back(p.id());
        widths.push_back(w);
        any_grad = any_grad || p.id() >= 0;
        offset += w;
    }
    if (tape && any_grad)
        tape->record(in_ids, y, [parts, widths, c_total, rows](const Tensor<S>& g) {
            std::vector<Tensor<S>> gs;
            int64_t off = 0;
            for (size_t i = 0; i < parts.size(); ++i) {
                Tensor<S> gp(parts[i].shape());
                for (int64_t r = 0; r < rows; ++r)
                    for (int64_t j = 0; j < widths[i]; ++j)
                        gp.data()[r * widths[i] + j] = g.data()[r * c_total + off + j];
                gs.push_back(std::move(gp));
                off += widths[i];
            }
            return gs;
        });
    return y;
}

// Fixed interleave: viewing channels as an N x (C/N) grid, the output reads
// the transpose, so out channel j*N + n = in channel n*(C/N) + j.
inline std::vector<int64_t> shuffle_permutation(int64_t c, int64_t n_groups) {
    if (n_groups < 1 || c % n_groups != 0)
        throw ConfigError("channel_shuffle: groups " + std::to_string(n_groups) +
                          " do not divide C=" + std::to_string(c));
    const int64_t g = c / n_groups;
    std::vector<int64_t> perm(static_cast<size_t>(c));
    for (int64_t j = 0; j < g; ++j)
        for (int64_t n = 0; n < n_groups; ++n)
            perm[static_cast<size_t>(j * n_groups + n)] = n * g + j;
    return perm;
}

// A seeded random channel permutation (Fisher-Yates), the ablation
// alternative to the fixed interleave.
inline std::vector<int64_t> random_permutation(int64_t c, Rng& rng) {
    std::vector<int64_t> perm(static_cast<size_t>(c));
    for (int64_t i = 0; i < c; ++i) perm[static_cast<size_t>(i)] = i;
    for (int64_t i = c - 1; i > 0; --i)
        std::swap(perm[static_cast<size_t>(i)],
                  perm[static_cast<size_t>(rng.uniform_int(static_cast<uint64_t>(i + 1)))]);
    return perm;
}

// Applies an arbitrary channel permutation: out channel j = in channel
// perm[j]. Backward applies the inverse permutation.
template <class S>
Tensor<S> channel_permute(Tape<S>* tape, const Tensor<S>& x, const std::vector<int64_t>& perm) {
    const int64_t c = x.dim(x.rank() - 1);
    if (static_cast<int64_t>(perm.size()) != c)
        throw ShapeError("channel_permute: permutation size " + std::to_string(perm.size()) +
                         " != C=" + std::to_string(c));
    Tensor<S> y = detail::channel_gather(x, perm, c);
    if (tape && detail::want_grad(x.id())) {
        std::vector<int64_t> inv(static_cast<size_t>(c));
        for (int64_t j = 0; j < c; ++j) inv[static_cast<size_t>(perm[static_cast<size_t>(j)])] = j;
        tape->record({x.id()}, y, [inv, c](const Tensor<S>& g) {
            return std::vector<Tensor<S>>{detail::channel_gather(g, inv, c)};
        });
    }
    return y;
}

template <class S>
Tensor<S> channel_shuffle(Tape<S>* tape, const Tensor<S>& x, int64_t n_groups) {
    const int64_t c = x.dim(x.rank() - 1);
    return channel_permute(tape, x, shuffle_permutation(c, n_groups));
}

// ---- batch norm ----

template <class S>
struct BatchNormState {
    Tensor<S> running_mean;
    Tensor<S> running_var;
    bool trained = false;

    explicit BatchNormState(int64_t channels = 1)
        : running_mean(zeros<S>({channels})), running_var(full<S>({channels}, S(1))) {}
};

enum class NormMode { Train, Eval };

inline constexpr double kBatchNormEps = 1e-5;
inline constexpr double kBatchNormMomentum = 0.9;

// Channel-last batch norm over all non-channel axes. Train mode normalizes
// with batch statistics and updates the running estimates in `state`; eval
// mode uses the running estimates.
template <class S>
Tensor<S> batch_norm(Tape<S>* tape, const Tensor<S>& x, const Tensor<S>& gamma,
                     const Tensor<S>& beta, BatchNormState<S>& state, NormMode mode) {
    const int64_t c = x.dim(x.rank() - 1);
    if (gamma.size() != c || beta.size() != c)
        throw ShapeError("batch_norm: gamma/beta must have C=" + std::to_string(c) + " elements");
    if (state.running_mean.size() != c) throw ShapeError("batch_norm: state channel mismatch");
    const int64_t rows = x.size() / c;
    const S eps = static_cast<S>(kBatchNormEps);

    Tensor<S> mean({c}), inv_std({c});
    if (mode == NormMode::Train) {
        if (rows < 2) throw ConfigError("batch_norm: train mode needs at least 2 positions");
        Tensor<S> var({c});
#pragma omp parallel for schedule(static) num_threads(max_threads())
        for (int64_t ci = 0; ci < c; ++ci) {
            S m = S(0);
            for (int64_t r = 0; r < rows; ++r) m += x.data()[r * c + ci];
            m /= static_cast<S>(rows);
            S v = S(0);
            for (int64_t r = 0; r < rows; ++r) {
                const S dlt = x.data()[r * c + ci] - m;
                v += dlt * dlt;
            }
            v /= static_cast<S>(rows);
            mean.data()[ci] = m;
            var.data()[ci] = v;
            inv_std.data()[ci] = S(1) / std::sqrt(v + eps);
        }
        const S mom = static_cast<S>(kBatchNormMomentum);
        for (int64_t ci = 0; ci < c; ++ci) {
            state.running_mean.data()[ci] = mom * state.running_mean.data()[ci] + (S(1) - mom) * mean.data()[ci];
            state.running_var.data()[ci] = mom * state.running_var.data()[ci] + (S(1) - mom) * var.data()[ci];
        }
        state.trained = true;
    } else {
        if (!state.trained) {
            static bool warned = false;
            if (!warned) {
                std::cerr << "warning: batch_norm eval before any train step; using initialized stats\n";
                warned = true;
            }
        }
        for (int64_t ci = 0; ci < c; ++ci) {
            mean.data()[ci] = state.running_mean.data()[ci];
            inv_std.data()[ci] = S(1) / std::sqrt(state.running_var.data()[ci] + eps);
        }
    }

    Tensor<S> y(x.shape());
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t r = 0; r < rows; ++r)
        for (int64_t ci = 0; ci < c; ++ci) {
            const S xhat = (x.data()[r * c + ci] - mean.data()[ci]) * inv_std.data()[ci];
            y.data()[r * c + ci] = gamma.data()[ci] * xhat + beta.data()[ci];
        }
    detail::check_finite(y, "batch_norm");

    if (tape && detail::want_grad(x.id(), gamma.id(), beta.id())) {
        const bool train = mode == NormMode::Train;
        tape->record({x.id(), gamma.id(), beta.id()}, y,
                     [x, gamma, mean, inv_std, rows, c, train](const Tensor<S>& g) {
                         Tensor<S> gx(x.shape()), ggamma({c}), gbeta({c});
#pragma omp parallel for schedule(static) num_threads(max_threads())
                         for (int64_t ci = 0; ci < c; ++ci) {
                             const S m = mean.data()[ci];
                             const S istd = inv_std.data()[ci];
                             S sum_g = S(0), sum_gx = S(0);
                             for (int64_t r = 0; r < rows; ++r) {
                                 const S gv = g.data()[r * c + ci];
                                 const S xhat = (x.data()[r * c + ci] - m) * istd;
                                 sum_g += gv;
                                 sum_gx += gv * xhat;
                             }
                             ggamma.data()[ci] = sum_gx;
                             gbeta.data()[ci] = sum_g;
                             const S scale_v = gamma.data()[ci] * istd;
                             if (train) {
                                 const S mg = sum_g / static_cast<S>(rows);
                                 const S mgx = sum_gx / static_cast<S>(rows);
                                 for (int64_t r = 0; r < rows; ++r) {
                                     const S xhat = (x.data()[r * c + ci] - m) * istd;
                                     gx.data()[r * c + ci] =
                                         scale_v * (g.data()[r * c + ci] - mg - xhat * mgx);
                                 }
                             } else {
                                 for (int64_t r = 0; r < rows; ++r)
                                     gx.data()[r * c + ci] = scale_v * g.data()[r * c + ci];
                             }
                         }
                         return std::vector<Tensor<S>>{gx, ggamma, gbeta};
                     });
    }
    return y;
}

// ---- losses ----

// Mean over batch and classes of the numerically stable binary
// cross-entropy on logits: max(z,0) - z*y + log(1 + exp(-|z|)).
template <class S>
Tensor<S> bce_with_logits(Tape<S>* tape, const Tensor<S>& logits, const Tensor<S>& targets) {
    if (logits.shape() != targets.shape()) throw ShapeError("bce_with_logits: shape mismatch");
    for (int64_t i = 0; i < targets.size(); ++i) {
        const S t = targets.data()[i];
        if (t != S(0) && t != S(1)) throw ConfigError("bce_with_logits: targets must be binary");
    }
    const int64_t n = logits.size();
    S acc = S(0);
    for (int64_t i = 0; i < n; ++i) {
        const S z = logits.data()[i];
        const S t = targets.data()[i];
        acc += std::max(z, S(0)) - z * t + std::log1p(std::exp(-std::abs(z)));
    }
    Tensor<S> y = full<S>({1}, acc / static_cast<S>(n));
    if (tape && detail::want_grad(logits.id()))
        tape->record({logits.id()}, y, [logits, targets, n](const Tensor<S>& g) {
            Tensor<S> gz(logits.shape());
            const S go = g.scalar() / static_cast<S>(n);
            for (int64_t i = 0; i < n; ++i) {
                const S z = logits.data()[i];
                const S sig = S(1) / (S(1) + std::exp(-z));
                gz.data()[i] = go * (sig - targets.data()[i]);
            }
            return std::vector<Tensor<S>>{gz};
        });
    return y;
}

// Mean over batch of log-sum-exp(z) - z[label].
template <class S>
Tensor<S> softmax_ce(Tape<S>* tape, const Tensor<S>& logits, const std::vector<int64_t>& labels) {
    if (logits.rank() != 2) throw ShapeError("softmax_ce: logits must be [B, K]");
    const int64_t b = logits.dim(0), k = logits.dim(1);
    if (static_cast<int64_t>(labels.size()) != b) throw ShapeError("softmax_ce: label count mismatch");
    for (int64_t lbl : labels)
        if (lbl < 0 || lbl >= k) throw ConfigError("softmax_ce: label index out of range");
    S acc = S(0);
    for (int64_t r = 0; r < b; ++r) {
        const S* z = logits.data() + r * k;
        S zmax = z[0];
        for (int64_t j = 1; j < k; ++j) zmax = std::max(zmax, z[j]);
        S lse = S(0);
        for (int64_t j = 0; j < k; ++j) lse += std::exp(z[j] - zmax);
        acc += zmax + std::log(lse) - z[labels[static_cast<size_t>(r)]];
    }
    Tensor<S> y = full<S>({1}, acc / static_cast<S>(b));
    if (tape && detail::want_grad(logits.id()))
        tape->record({logits.id()}, y, [logits, labels, b, k](const Tensor<S>& g) {
            Tensor<S> gz(logits.shape());
            const S go = g.scalar() / static_cast<S>(b);
            for (int64_t r = 0; r < b; ++r) {
                const S* z = logits.data() + r * k;
                S zmax = z[0];
                for (int64_t j = 1; j < k; ++j) zmax = std::max(zmax, z[j]);
                S lse = S(0);
                for (int64_t j = 0; j < k; ++j) lse += std::exp(z[j] - zmax);
                for (int64_t j = 0; j < k; ++j) {
                    S p = std::exp(z[j] - zmax) / lse;
                    if (j == labels[static_cast<size_t>(r)]) p -= S(1);
                    gz.data()[r * k + j] = go * p;
                }
            }
            return std::vector<Tensor<S>>{gz};
        });
    return y;
}

}  // namespace tc

#endif  // TC_OPS_HPP
