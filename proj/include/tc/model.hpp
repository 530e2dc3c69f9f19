// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Full classification network: ingested backbone features -> Timeception
// stack -> spatial average pool -> final temporal reduction -> MLP head.

#ifndef TC_MODEL_HPP
#define TC_MODEL_HPP

#include <string>
#include <vector>

#include "tc/timeception.hpp"

namespace tc {

enum class Task { MultiLabel, MultiClass };

inline std::string task_name(Task t) { return t == Task::MultiLabel ? "multilabel" : "multiclass"; }

struct ModelConfig {
    int64_t input_timesteps = 128;  // T0
    int64_t spatial = 7;            // L
    TimeceptionConfig tc;
    int64_t hidden = 512;  // classifier hidden width H
    int64_t classes = 157; // K
    Task task = Task::MultiLabel;

    void validate() const {
        if (classes < 2) throw ConfigError("model: classes must be >= 2");
        if (input_timesteps % (int64_t(1) << tc.num_layers) != 0)
            throw ConfigError("model: T0=" + std::to_string(input_timesteps) +
                              " not divisible by 2^" + std::to_string(tc.num_layers));
        channel_trajectory(tc);  // throws on a degenerate layer
    }

    int64_t final_timesteps() const { return input_timesteps >> tc.num_layers; }
    int64_t final_channels() const { return channel_trajectory(tc).back(); }

    HeadConfig head() const { return HeadConfig{input_timesteps, hidden, classes}; }
};

template <class S>
struct Model {
    ModelConfig config;
    Stack<S> stack;
    Param<S> head_dw_w;  // [T_f, C_f] final depthwise temporal kernel
    Param<S> head_dw_b;
    Param<S> head_bn_gamma;
    Param<S> head_bn_beta;
    BatchNormState<S> head_bn_state;
    Param<S> fc1_w;  // [C_f, H]
    Param<S> fc1_b;
    Param<S> fc2_w;  // [H, K]
    Param<S> fc2_b;

    std::vector<Param<S>*> parameters() {
        std::vector<Param<S>*> out = stack.parameters();
        for (Param<S>* p : {&head_dw_w, &head_dw_b, &head_bn_gamma, &head_bn_beta, &fc1_w, &fc1_b,
                            &fc2_w, &fc2_b})
            out.push_back(p);
        return out;
    }

    // Trainable scalars under the paper-matching convention: weights only.
    int64_t weight_param_count() {
        int64_t acc = 0;
        for (Param<S>* p : parameters())
            if (p->decay) acc += p->value.size();
        return acc;
    }
};

template <class S>
Model<S> build_model(const ModelConfig& cfg, Rng& rng) {
    cfg.validate();
    Model<S> model;
    model.config = cfg;
    model.stack = build_stack<S>(cfg.tc, rng);
    const int64_t t_f = cfg.final_timesteps();
    const int64_t c_f = cfg.final_channels();
    model.head_dw_w = Param<S>("head.dw.w",
                               randn<S>({t_f, c_f}, rng, std::sqrt(2.0 / static_cast<double>(t_f))),
                               true);
    model.head_dw_b = Param<S>("head.dw.b", zeros<S>({c_f}), false);
    model.head_bn_gamma = Param<S>("head.bn.gamma", full<S>({c_f}, S(1)), false);
    model.head_bn_beta = Param<S>("head.bn.beta", zeros<S>({c_f}), false);
    model.head_bn_state = BatchNormState<S>(c_f);
    model.fc1_w = Param<S>("head.fc1.w",
                           randn<S>({c_f, cfg.hidden}, rng, std::sqrt(2.0 / static_cast<double>(c_f))),
                           true);
    model.fc1_b = Param<S>("head.fc1.b", zeros<S>({cfg.hidden}), false);
    model.fc2_w = Param<S>("head.fc2.w",
                           randn<S>({cfg.hidden, cfg.classes},
                                    rng, std::sqrt(2.0 / static_cast<double>(cfg.hidden))),
                           true);
    model.fc2_b = Param<S>("head.fc2.b", zeros<S>({cfg.classes}), false);
    return model;
}

// x: [B, T0, L, L, C0] -> logits [B, K].
template <class S>
Tensor<S> forward(Tape<S>* tape, Model<S>& model, const Tensor<S>& x, NormMode mode) {
    const ModelConfig& cfg = model.config;
    if (x.rank() != 5 || x.dim(1) != cfg.input_timesteps || x.dim(2) != cfg.spatial ||
        x.dim(3) != cfg.spatial || x.dim(4) != cfg.tc.input_channels)
        throw ShapeError("forward: input " + shape_str(x.shape()) + " does not match model config");

    Tensor<S> y = forward_stack(tape, x, model.stack, mode);
    y = spatial_avg_pool(tape, y);  // [B, T_f, C_f]

    // Final depthwise temporal conv over the whole remaining extent, no
    // padding, collapsing T_f -> 1.
    const int64_t b = y.dim(0), t_f = y.dim(1), c_f = y.dim(2);
    y = reshape(tape, y, {b, t_f, 1, 1, c_f});
    y = depthwise_temporal_conv(tape, y, model.head_dw_w.value, model.head_dw_b.value,
                                ConvSpec{t_f, 1, Padding::Valid});
    y = reshape(tape, y, {b, c_f});
    y = batch_norm(tape, y, model.head_bn_gamma.value, model.head_bn_beta.value,
                   model.head_bn_state, mode);
    y = relu(tape, y);
    y = dense(tape, y, model.fc1_w.value, model.fc1_b.value);
    y = relu(tape, y);
    return dense(tape, y, model.fc2_w.value, model.fc2_b.value);
}

// Eval-mode class probabilities: sigmoid per class (multilabel) or softmax
// rows (multiclass).
template <class S>
Tensor<S> predict_scores(Model<S>& model, const Tensor<S>& x) {
    Tensor<S> logits = forward<S>(nullptr, model, x, NormMode::Eval);
    const int64_t b = logits.dim(0), k = logits.dim(1);
    Tensor<S> probs(logits.shape());
    if (model.config.task == Task::MultiLabel) {
        for (int64_t i = 0; i < logits.size(); ++i)
            probs.data()[i] = S(1) / (S(1) + std::exp(-logits.data()[i]));
    } else {
        for (int64_t r = 0; r < b; ++r) {
            const S* z = logits.data() + r * k;
            S zmax = z[0];
            for (int64_t j = 1; j < k; ++j) zmax = std::max(zmax, z[j]);
            S lse = S(0);
            for (int64_t j = 0; j < k; ++j) lse += std::exp(z[j] - zmax);
            for (int64_t j = 0; j < k; ++j) probs.data()[r * k + j] = std::exp(z[j] - zmax) / lse;
        }
    }
    return probs;
}

// Checkpoint file: magic "TCPT", u32 version, u32 JSON config length + the
// JSON block, then every parameter tensor (including norm running stats) in
// declared order as little-endian f32 with a per-tensor shape header.
void save_checkpoint(const std::string& path, Model<double>& model);
void save_checkpoint(const std::string& path, Model<float>& model);
Model<double> load_checkpoint_f64(const std::string& path);
Model<float> load_checkpoint_f32(const std::string& path);

std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& json_text);

}  // namespace tc

#endif  // TC_MODEL_HPP
