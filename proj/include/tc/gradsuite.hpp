// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// The finite-difference suite over every differentiable op plus a tiny
// end-to-end model. Shared by the CLI `gradcheck` subcommand, the unit
// tests, and the acceptance gate.

#ifndef TC_GRADSUITE_HPP
#define TC_GRADSUITE_HPP

#include <string>
#include <vector>

#include "tc/gradcheck.hpp"
#include "tc/model.hpp"
#include "tc/timeception.hpp"

namespace tc {

struct GradCase {
    std::string name;
    double rel_err = 0.0;
    double tol = 1e-4;
    bool ok() const { return rel_err < tol; }
};

inline std::vector<GradCase> run_gradient_suite(bool full) {
    std::vector<GradCase> out;
    Rng rng(17);
    // Each step size has its own error floor (roundoff below, truncation and
    // kink straddling above), so the check scans a few and keeps the best; a
    // wrong analytic gradient fails at every step size.
    auto check_scan = [&](const std::string& name, const ScalarFn<double>& fn,
                          const Tensor<double>& x, const std::vector<double>& eps_scan) {
        FiniteDiffOptions opt;
        opt.sample_seed = 9 + out.size();
        GradCase gc;
        gc.name = name;
        gc.rel_err = std::numeric_limits<double>::infinity();
        for (double eps : eps_scan) {
            opt.eps = eps;
            gc.rel_err = std::min(gc.rel_err, finite_diff_check<double>(fn, x, opt));
            if (gc.ok()) break;
        }
        out.push_back(gc);
    };
    auto check = [&](const std::string& name, const ScalarFn<double>& fn, const Tensor<double>& x) {
        check_scan(name, fn, x, {1e-4});
    };

    using T = Tensor<double>;
    const T x4 = randn<double>({2, 6, 2, 3}, rng);  // [B,T,Q,C]

    check("relu", [](Tape<double>* tp, const T& x) {
        return sum(tp, relu(tp, x));
    }, randn<double>({3, 5}, rng));

    {
        const T b = randn<double>({3, 5}, rng);
        check("add_mul_scale", [b](Tape<double>* tp, const T& x) {
            return sum(tp, scale(tp, mul(tp, add(tp, x, b), sub(tp, x, b)), 0.5));
        }, randn<double>({3, 5}, rng));
    }

    check("reshape", [](Tape<double>* tp, const T& x) {
        return sum(tp, relu(tp, reshape(tp, x, {6, 5})));
    }, randn<double>({2, 3, 5}, rng));

    // Depthwise conv: x is the leaf; weights/bias held fixed inside fn.
    std::vector<std::pair<int64_t, int64_t>> kd = {{3, 1}, {5, 2}};
    if (full) kd = {{3, 1}, {3, 2}, {3, 3}, {5, 1}, {5, 2}, {7, 1}, {7, 3}, {1, 1}};
    for (auto [k, d] : kd) {
        const T w = randn<double>({k, 3}, rng);
        const T b = randn<double>({3}, rng);
        for (Padding pad : {Padding::Same, Padding::Valid}) {
            if (pad == Padding::Valid && (k - 1) * d + 1 > 6) continue;
            ConvSpec spec{k, d, pad};
            const std::string name = "dw_conv_k" + std::to_string(k) + "_d" + std::to_string(d) +
                                     (pad == Padding::Same ? "_same" : "_valid");
            check(name + "_x", [w, b, spec](Tape<double>* tp, const T& x) {
                return sum(tp, mul(tp, depthwise_temporal_conv(tp, x, w, b, spec),
                                   depthwise_temporal_conv(tp, x, w, b, spec)));
            }, x4);
            const T xin = x4;
            check(name + "_w", [xin, b, spec](Tape<double>* tp, const T& w2) {
                auto y = depthwise_temporal_conv(tp, xin, w2, b, spec);
                return sum(tp, mul(tp, y, y));
            }, w);
            check(name + "_b", [xin, w, spec](Tape<double>* tp, const T& b2) {
                auto y = depthwise_temporal_conv(tp, xin, w, b2, spec);
                return sum(tp, mul(tp, y, y));
            }, b);
        }
    }

    {
        const T w = randn<double>({3, 4}, rng);
        const T b = randn<double>({4}, rng);
        check("pointwise_x", [w, b](Tape<double>* tp, const T& x) {
            auto y = pointwise_conv(tp, x, w, b);
            return sum(tp, mul(tp, y, y));
        }, x4);
        check("pointwise_w", [this_x = x4, b](Tape<double>* tp, const T& w2) {
            auto y = pointwise_conv(tp, this_x, w2, b);
            return sum(tp, mul(tp, y, y));
        }, w);
        check("pointwise_b", [this_x = x4, w](Tape<double>* tp, const T& b2) {
            auto y = pointwise_conv(tp, this_x, w, b2);
            return sum(tp, mul(tp, y, y));
        }, b);
    }

    for (Padding pad : {Padding::Same, Padding::Valid}) {
        PoolSpec spec{2, 2, pad};
        check(std::string("max_pool_") + (pad == Padding::Same ? "same" : "valid"),
              [spec](Tape<double>* tp, const T& x) {
                  auto y = temporal_max_pool(tp, x, spec);
                  return sum(tp, mul(tp, y, y));
              }, x4);
    }

    check("spatial_avg_pool", [](Tape<double>* tp, const T& x) {
        auto y = spatial_avg_pool(tp, x);
        return sum(tp, mul(tp, y, y));
    }, randn<double>({2, 3, 2, 2, 3}, rng));

    check("channel_shuffle", [](Tape<double>* tp, const T& x) {
        auto y = channel_shuffle(tp, x, 3);
        return sum(tp, mul(tp, y, y));
    }, randn<double>({2, 4, 6}, rng));

    check("split_concat", [](Tape<double>* tp, const T& x) {
        auto parts = channel_split(tp, x, 2);
        auto y = channel_concat(tp, std::vector<T>{parts[1], parts[0]});
        return sum(tp, mul(tp, y, y));
    }, randn<double>({2, 4, 6}, rng));

    {
        const T gamma = randn<double>({3}, rng);
        const T beta = randn<double>({3}, rng);
        check("batch_norm_x", [gamma, beta](Tape<double>* tp, const T& x) {
            BatchNormState<double> st(3);
            auto y = batch_norm(tp, x, gamma, beta, st, NormMode::Train);
            return sum(tp, mul(tp, y, y));
        }, x4);
        check("batch_norm_gamma", [this_x = x4, beta](Tape<double>* tp, const T& g2) {
            BatchNormState<double> st(3);
            auto y = batch_norm(tp, this_x, g2, beta, st, NormMode::Train);
            return sum(tp, mul(tp, y, y));
        }, gamma);
        check("batch_norm_beta", [this_x = x4, gamma](Tape<double>* tp, const T& b2) {
            BatchNormState<double> st(3);
            auto y = batch_norm(tp, this_x, gamma, b2, st, NormMode::Train);
            return sum(tp, mul(tp, y, y));
        }, beta);
    }

    {
        Rng trng(5);
        T targets({4, 3});
        for (int64_t i = 0; i < targets.size(); ++i)
            targets.data()[i] = trng.uniform() < 0.5 ? 0.0 : 1.0;
        check("bce_with_logits", [targets](Tape<double>* tp, const T& z) {
            return bce_with_logits(tp, z, targets);
        }, randn<double>({4, 3}, rng));
        std::vector<int64_t> labels = {0, 2, 1, 2};
        check("softmax_ce", [labels](Tape<double>* tp, const T& z) {
            return softmax_ce(tp, z, labels);
        }, randn<double>({4, 3}, rng));
    }

    // End to end: tiny model, loss vs input and vs every parameter tensor.
    {
        ModelConfig cfg;
        cfg.input_timesteps = 8;
        cfg.spatial = 2;
        cfg.tc.input_channels = 16;
        cfg.tc.num_layers = 1;
        cfg.tc.groups = 4;
        cfg.tc.reduction = 4;
        cfg.tc.mode = MultiScaleMode::MultiKernel;
        cfg.hidden = 8;
        cfg.classes = 3;
        cfg.validate();
        Rng mrng(23);
        Model<double> model = build_model<double>(cfg, mrng);
        Rng trng(31);
        T targets({2, 3});
        for (int64_t i = 0; i < targets.size(); ++i)
            targets.data()[i] = trng.uniform() < 0.5 ? 0.0 : 1.0;
        const T xin = randn<double>({2, 8, 2, 2, 16}, rng);

        check("model_end_to_end_x", [&model, targets](Tape<double>* tp, const T& x) {
            return bce_with_logits(tp, forward(tp, model, x, NormMode::Train), targets);
        }, xin);

        auto params = model.parameters();
        const size_t stride = full ? 1 : std::max<size_t>(1, params.size() / 8);
        for (size_t i = 0; i < params.size(); i += stride) {
            Param<double>* p = params[i];
            check_scan("model_param_" + p->name,
                       [&model, p, targets, xin](Tape<double>* tp, const T& v) {
                           const T saved = p->value;
                           p->value = v;  // v carries the tape id when recording
                           T loss =
                               bce_with_logits(tp, forward(tp, model, xin, NormMode::Train), targets);
                           p->value = saved;
                           return loss;
                       },
                       p->value, {1e-4, 1e-3, 1e-5});
        }
    }
    return out;
}

}  // namespace tc

#endif  // TC_GRADSUITE_HPP
