// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstring>
#include <fstream>

#include "json.hpp"
#include "tc/model.hpp"

namespace tc {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'T', 'C', 'P', 'T'};
constexpr uint32_t kVersion = 1;

// Declared tensor order: the trainable parameters, then per-layer norm
// running stats, then the head norm running stats.
template <class S>
std::vector<Tensor<S>*> checkpoint_tensors(Model<S>& model) {
    std::vector<Tensor<S>*> out;
    for (Param<S>* p : model.parameters()) out.push_back(&p->value);
    for (auto& layer : model.stack.layers) {
        out.push_back(&layer.bn_state.running_mean);
        out.push_back(&layer.bn_state.running_var);
    }
    out.push_back(&model.head_bn_state.running_mean);
    out.push_back(&model.head_bn_state.running_var);
    return out;
}

void put_u32(std::ostream& os, uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    os.write(b, 4);
}

uint32_t get_u32(std::istream& is) {
    char b[4];
    is.read(b, 4);
    if (!is) throw FormatError("checkpoint: truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    return v;
}

template <class S>
void save_impl(const std::string& path, Model<S>& model) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("checkpoint: cannot open " + path);
    f.write(kMagic, 4);
    put_u32(f, kVersion);
    const std::string cfg = model_config_to_json(model.config);
    put_u32(f, static_cast<uint32_t>(cfg.size()));
    f.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));
    for (Tensor<S>* t : checkpoint_tensors(model)) {
        put_u32(f, static_cast<uint32_t>(t->rank()));
        for (int64_t i = 0; i < t->rank(); ++i) put_u32(f, static_cast<uint32_t>(t->dim(i)));
        for (int64_t i = 0; i < t->size(); ++i) {
            const float v = static_cast<float>(t->at(i));
            uint32_t bits;
            std::memcpy(&bits, &v, 4);
            put_u32(f, bits);
        }
    }
    if (!f) throw FormatError("checkpoint: write failed for " + path);
}

template <class S>
Model<S> load_impl(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("checkpoint: cannot open " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
    const uint32_t version = get_u32(f);
    if (version != kVersion)
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    const uint32_t cfg_len = get_u32(f);
    std::string cfg_text(cfg_len, '\0');
    f.read(cfg_text.data(), cfg_len);
    if (!f) throw FormatError("checkpoint: truncated config block");
    const ModelConfig cfg = model_config_from_json(cfg_text);

    Rng rng(0);
    Model<S> model = build_model<S>(cfg, rng);
    for (Tensor<S>* t : checkpoint_tensors(model)) {
        const uint32_t rank = get_u32(f);
        Shape shape(rank);
        for (uint32_t i = 0; i < rank; ++i) shape[i] = get_u32(f);
        if (shape != t->shape())
            throw FormatError("checkpoint: tensor shape " + shape_str(shape) +
                              " does not match model's " + shape_str(t->shape()));
        Tensor<S> loaded(shape);
        for (int64_t i = 0; i < loaded.size(); ++i) {
            const uint32_t bits = get_u32(f);
            float v;
            std::memcpy(&v, &bits, 4);
            loaded.data()[i] = static_cast<S>(v);
        }
        *t = loaded;
    }
    // Loaded norm stats are usable in eval mode.
    for (auto& layer : model.stack.layers) layer.bn_state.trained = true;
    model.head_bn_state.trained = true;
    return model;
}

}  // namespace

void save_checkpoint(const std::string& path, Model<double>& model) { save_impl(path, model); }
void save_checkpoint(const std::string& path, Model<float>& model) { save_impl(path, model); }
Model<double> load_checkpoint_f64(const std::string& path) { return load_impl<double>(path); }
Model<float> load_checkpoint_f32(const std::string& path) { return load_impl<float>(path); }

std::string model_config_to_json(const ModelConfig& cfg) {
    json j;
    j["t0"] = cfg.input_timesteps;
    j["l"] = cfg.spatial;
    j["layers"] = cfg.tc.num_layers;
    j["groups"] = cfg.tc.groups;
    j["reduction"] = cfg.tc.reduction;
    j["mode"] = mode_name(cfg.tc.mode);
    j["c0"] = cfg.tc.input_channels;
    j["shuffle_seed"] = cfg.tc.shuffle_seed;
    j["hidden"] = cfg.hidden;
    j["classes"] = cfg.classes;
    j["task"] = task_name(cfg.task);
    return j.dump();
}

ModelConfig model_config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw FormatError(std::string("model config: bad JSON: ") + e.what());
    }
    ModelConfig cfg;
    cfg.input_timesteps = j.at("t0").get<int64_t>();
    cfg.spatial = j.at("l").get<int64_t>();
    cfg.tc.num_layers = j.at("layers").get<int64_t>();
    cfg.tc.groups = j.at("groups").get<int64_t>();
    cfg.tc.reduction = j.at("reduction").get<int64_t>();
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "multi_kernel") cfg.tc.mode = MultiScaleMode::MultiKernel;
    else if (mode == "multi_dilation") cfg.tc.mode = MultiScaleMode::MultiDilation;
    else if (mode == "fixed") cfg.tc.mode = MultiScaleMode::Fixed;
    else throw ConfigError("model config: unknown mode " + mode);
    cfg.tc.input_channels = j.at("c0").get<int64_t>();
    if (j.contains("shuffle_seed")) cfg.tc.shuffle_seed = j.at("shuffle_seed").get<int64_t>();
    cfg.hidden = j.at("hidden").get<int64_t>();
    cfg.classes = j.at("classes").get<int64_t>();
    const std::string task = j.at("task").get<std::string>();
    if (task == "multilabel") cfg.task = Task::MultiLabel;
    else if (task == "multiclass") cfg.task = Task::MultiClass;
    else throw ConfigError("model config: unknown task " + task);
    cfg.validate();
    return cfg;
}

}  // namespace tc
