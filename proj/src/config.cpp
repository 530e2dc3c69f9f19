// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace tc {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
    }
}

template <class T>
void get_num(const json& obj, const char* key, T* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_number())
        throw ConfigError(std::string("config: \"") + key + "\" must be a number");
    *out = it->get<T>();
}

void get_str(const json& obj, const char* key, std::string* out) {
    auto it = obj.find(key);
    if (it == obj.end()) return;
    if (!it->is_string())
        throw ConfigError(std::string("config: \"") + key + "\" must be a string");
    *out = it->get<std::string>();
}

MultiScaleMode mode_from_name(const std::string& s) {
    if (s == "multi_kernel") return MultiScaleMode::MultiKernel;
    if (s == "multi_dilation") return MultiScaleMode::MultiDilation;
    if (s == "fixed") return MultiScaleMode::Fixed;
    throw ConfigError("config: unknown mode \"" + s + "\"");
}

void parse_model(const json& obj, ModelConfig* m) {
    reject_unknown(obj, "model",
                   {"t0", "l", "c0", "layers", "groups", "reduction", "mode", "hidden", "classes",
                    "task", "shuffle_seed"});
    get_num(obj, "t0", &m->input_timesteps);
    get_num(obj, "l", &m->spatial);
    get_num(obj, "c0", &m->tc.input_channels);
    get_num(obj, "layers", &m->tc.num_layers);
    get_num(obj, "groups", &m->tc.groups);
    get_num(obj, "reduction", &m->tc.reduction);
    get_num(obj, "hidden", &m->hidden);
    get_num(obj, "classes", &m->classes);
    get_num(obj, "shuffle_seed", &m->tc.shuffle_seed);
    std::string s;
    get_str(obj, "mode", &s);
    if (!s.empty()) m->tc.mode = mode_from_name(s);
    s.clear();
    get_str(obj, "task", &s);
    if (!s.empty()) {
        if (s == "multilabel") m->task = Task::MultiLabel;
        else if (s == "multiclass") m->task = Task::MultiClass;
        else throw ConfigError("config: unknown task \"" + s + "\"");
    }
}

void parse_train(const json& obj, HParams* hp) {
    reject_unknown(obj, "train", {"lr", "momentum", "weight_decay", "batch_size", "epochs", "seed"});
    get_num(obj, "lr", &hp->lr);
    get_num(obj, "momentum", &hp->momentum);
    get_num(obj, "weight_decay", &hp->weight_decay);
    get_num(obj, "batch_size", &hp->batch_size);
    get_num(obj, "epochs", &hp->epochs);
    get_num(obj, "seed", &hp->seed);
}

void parse_data(const json& obj, DeskTask* d) {
    reject_unknown(obj, "data",
                   {"t", "l", "c", "classes", "train_samples", "test_samples", "noise", "seed"});
    get_num(obj, "t", &d->t);
    get_num(obj, "l", &d->l);
    get_num(obj, "c", &d->c);
    get_num(obj, "classes", &d->k);
    get_num(obj, "train_samples", &d->train_samples);
    get_num(obj, "test_samples", &d->test_samples);
    get_num(obj, "noise", &d->noise_sigma);
    get_num(obj, "seed", &d->data_seed);
}

MotifSpec parse_motif(const json& obj, size_t idx) {
    const std::string where = "motifs[" + std::to_string(idx) + "]";
    if (!obj.is_object()) throw ConfigError("config: " + where + " must be an object");
    reject_unknown(obj, where,
                   {"channels", "duration", "amplitude", "scale_min", "scale_max", "after"});
    MotifSpec m;
    auto it = obj.find("channels");
    if (it == obj.end() || !it->is_array())
        throw ConfigError("config: " + where + " needs a \"channels\" array");
    m.channels.clear();
    for (const auto& ch : *it) {
        if (!ch.is_number_integer()) throw ConfigError("config: " + where + ": bad channel index");
        m.channels.push_back(ch.get<int64_t>());
    }
    get_num(obj, "duration", &m.duration);
    get_num(obj, "amplitude", &m.amplitude);
    get_num(obj, "scale_min", &m.scale_min);
    get_num(obj, "scale_max", &m.scale_max);
    get_num(obj, "after", &m.after);
    return m;
}

void parse_alteration(const json& obj, AlterationSpec* a) {
    reject_unknown(obj, "alteration", {"granularity", "seed"});
    std::string s;
    get_str(obj, "granularity", &s);
    if (!s.empty()) a->granularity = granularity_from_name(s);
    get_num(obj, "seed", &a->seed);
}

}  // namespace

CliConfig::CliConfig() {
    // Defaults are the desk-scale task: small enough to train on one core,
    // large enough that temporal extent and order carry signal.
    model = data.model_config(MultiScaleMode::MultiKernel);
    train = data.hparams();
    motifs = default_motifs(data.k, data.c, data.t);
}

CliConfig parse_cli_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    reject_unknown(doc, "top level", {"model", "train", "data", "motifs", "alteration", "precision"});

    CliConfig cfg;
    bool custom_model = false;
    if (doc.contains("data")) {
        if (!doc["data"].is_object()) throw ConfigError("config: \"data\" must be an object");
        parse_data(doc["data"], &cfg.data);
        // Re-derive the model and motifs from the task dims unless overridden.
        cfg.model = cfg.data.model_config(MultiScaleMode::MultiKernel);
        cfg.motifs = default_motifs(cfg.data.k, cfg.data.c, cfg.data.t);
    }
    if (doc.contains("model")) {
        if (!doc["model"].is_object()) throw ConfigError("config: \"model\" must be an object");
        parse_model(doc["model"], &cfg.model);
        custom_model = true;
    }
    if (doc.contains("train")) {
        if (!doc["train"].is_object()) throw ConfigError("config: \"train\" must be an object");
        parse_train(doc["train"], &cfg.train);
    }
    if (doc.contains("motifs")) {
        if (!doc["motifs"].is_array()) throw ConfigError("config: \"motifs\" must be an array");
        cfg.motifs.clear();
        for (size_t i = 0; i < doc["motifs"].size(); ++i)
            cfg.motifs.push_back(parse_motif(doc["motifs"][i], i));
    }
    if (doc.contains("alteration")) {
        if (!doc["alteration"].is_object())
            throw ConfigError("config: \"alteration\" must be an object");
        parse_alteration(doc["alteration"], &cfg.alteration);
    }
    if (doc.contains("precision")) {
        if (!doc["precision"].is_string())
            throw ConfigError("config: \"precision\" must be a string");
        const std::string p = doc["precision"].get<std::string>();
        if (p == "f32") cfg.precision = Precision::F32;
        else if (p == "f64") cfg.precision = Precision::F64;
        else throw ConfigError("config: unknown precision \"" + p + "\"");
    }

    if (!custom_model) {
        // Keep the model consistent with the data dims.
        cfg.model.input_timesteps = cfg.data.t;
        cfg.model.spatial = cfg.data.l;
        cfg.model.tc.input_channels = cfg.data.c;
        cfg.model.classes = cfg.data.k;
    }
    cfg.model.validate();
    cfg.train.validate();
    return cfg;
}

CliConfig load_cli_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_cli_config(ss.str());
}

std::string cli_config_to_json(const CliConfig& cfg) {
    json doc;
    doc["model"] = json::parse(model_config_to_json(cfg.model));
    doc["precision"] = cfg.precision == Precision::F32 ? "f32" : "f64";
    doc["train"] = {{"lr", cfg.train.lr},
                    {"momentum", cfg.train.momentum},
                    {"weight_decay", cfg.train.weight_decay},
                    {"batch_size", cfg.train.batch_size},
                    {"epochs", cfg.train.epochs},
                    {"seed", cfg.train.seed}};
    doc["data"] = {{"t", cfg.data.t},
                   {"l", cfg.data.l},
                   {"c", cfg.data.c},
                   {"classes", cfg.data.k},
                   {"train_samples", cfg.data.train_samples},
                   {"test_samples", cfg.data.test_samples},
                   {"noise", cfg.data.noise_sigma},
                   {"seed", cfg.data.data_seed}};
    doc["motifs"] = json::array();
    for (const auto& m : cfg.motifs) {
        doc["motifs"].push_back({{"channels", m.channels},
                                 {"duration", m.duration},
                                 {"amplitude", m.amplitude},
                                 {"scale_min", m.scale_min},
                                 {"scale_max", m.scale_max},
                                 {"after", m.after}});
    }
    doc["alteration"] = {{"granularity", granularity_name(cfg.alteration.granularity)},
                         {"seed", cfg.alteration.seed}};
    return doc.dump(2);
}

}  // namespace tc
