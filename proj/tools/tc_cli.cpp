// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// tc: dataset generation, training, evaluation, parameter accounting,
// extent alteration, gradient checks, experiments, and kernel dumps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "tc/config.hpp"
#include "tc/experiments.hpp"
#include "tc/gradsuite.hpp"
#include "tc/model.hpp"
#include "tc/train.hpp"

namespace {

using tc::CliConfig;

CliConfig load_or_default(const std::string& path) {
    if (path.empty()) return CliConfig();
    return tc::load_cli_config(path);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tc::FormatError("cannot open " + path + " for writing");
    out << text;
}

void write_sidecar_config(const std::string& artifact_path, const CliConfig& cfg) {
    write_text(artifact_path + ".json", tc::cli_config_to_json(cfg));
}

int cmd_gen_data(const std::string& config_path, const std::string& out, int64_t samples,
                 int64_t seed) {
    CliConfig cfg = load_or_default(config_path);
    if (seed >= 0) cfg.data.data_seed = static_cast<uint64_t>(seed);
    if (samples >= 0) cfg.data.train_samples = samples;
    for (const auto& m : cfg.motifs) m.validate(cfg.data.t, cfg.data.c);
    tc::Rng rng(cfg.data.data_seed);
    tc::FeatureDataset ds = tc::synth_generate(cfg.motifs, cfg.data.train_samples, cfg.data.t,
                                               cfg.data.l, cfg.data.c, cfg.data.noise_sigma, rng);
    ds.seed = cfg.data.data_seed;
    tc::write_features(out, ds);
    write_sidecar_config(out, cfg);
    std::cout << "wrote " << ds.samples.size() << " samples to " << out << "\n";
    return 0;
}

nlohmann::json report_json(const tc::RunReport& r, const CliConfig& cfg) {
    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(tc::cli_config_to_json(cfg));
    doc["seed"] = r.seed;
    doc["epoch_loss"] = r.epoch_loss;
    doc["epoch_map"] = r.epoch_map;
    doc["final_map"] = r.final_map;
    doc["final_accuracy"] = r.final_accuracy;
    return doc;
}

template <class S>
int run_train(CliConfig& cfg, const tc::FeatureDataset& ds, const std::string& out_model,
              const std::string& report_path) {
    tc::Rng rng(cfg.train.seed);
    tc::Model<S> model = tc::build_model<S>(cfg.model, rng);
    tc::RunReport report = tc::train(model, ds, cfg.train, nullptr);
    report.config_json = tc::cli_config_to_json(cfg);
    if (!out_model.empty()) tc::save_checkpoint(out_model, model);
    if (!report_path.empty()) write_text(report_path, report_json(report, cfg).dump(2));
    std::cout << "final epoch loss " << report.epoch_loss.back() << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& out_model, const std::string& report_path) {
    CliConfig cfg = load_or_default(config_path);
    tc::FeatureDataset ds = tc::read_features(data_path);
    if (ds.t != cfg.model.input_timesteps || ds.l != cfg.model.spatial ||
        ds.c != cfg.model.tc.input_channels || ds.k != cfg.model.classes)
        throw tc::ConfigError("train: dataset dims [T=" + std::to_string(ds.t) + ",L=" +
                              std::to_string(ds.l) + ",C=" + std::to_string(ds.c) + ",K=" +
                              std::to_string(ds.k) + "] do not match the model config");
    if (cfg.precision == tc::Precision::F32)
        return run_train<float>(cfg, ds, out_model, report_path);
    return run_train<double>(cfg, ds, out_model, report_path);
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& report_path) {
    tc::Model<double> model = tc::load_checkpoint_f64(model_path);
    tc::FeatureDataset ds = tc::read_features(data_path);
    auto scores = tc::score_dataset(model, ds);
    auto labels = tc::dataset_labels(ds);
    tc::MeanApResult map = tc::mean_ap(scores, labels);
    double acc = tc::accuracy(scores, labels);

    nlohmann::json doc;
    doc["config"] = nlohmann::json::parse(tc::model_config_to_json(model.config));
    doc["samples"] = ds.samples.size();
    doc["map"] = map.map;
    doc["classes_evaluated"] = map.classes_evaluated;
    doc["classes_skipped"] = map.classes_skipped;
    doc["accuracy"] = acc;
    const std::string text = doc.dump(2);
    if (!report_path.empty()) write_text(report_path, text);
    std::cout << text << "\n";
    return 0;
}

int cmd_param_count(const std::string& config_path) {
    CliConfig cfg = load_or_default(config_path);
    tc::ParamReport report = tc::count_params(cfg.model.tc, cfg.model.head());
    std::cout << report.to_csv();
    std::fprintf(stderr, "total %.2fM\n", static_cast<double>(report.total) / 1e6);
    return 0;
}

int cmd_alter(const std::string& data_path, const std::string& granularity, int64_t seed,
              const std::string& out) {
    tc::FeatureDataset ds = tc::read_features(data_path);
    tc::AlterationSpec spec;
    spec.granularity = tc::granularity_from_name(granularity);
    spec.seed = static_cast<uint64_t>(seed);
    tc::FeatureDataset altered = tc::alter_extents(ds, spec);
    tc::write_features(out, altered);
    std::cout << "wrote " << altered.samples.size() << " altered samples to " << out << "\n";
    return 0;
}

int cmd_gradcheck(bool full) {
    auto cases = tc::run_gradient_suite(full);
    bool all_ok = true;
    for (const auto& gc : cases) {
        std::printf("%-32s rel_err %.3e  %s\n", gc.name.c_str(), gc.rel_err,
                    gc.ok() ? "ok" : "FAIL");
        all_ok = all_ok && gc.ok();
    }
    if (!all_ok) {
        std::fprintf(stderr, "gradient check failed\n");
        return 3;
    }
    std::printf("%zu checks passed\n", cases.size());
    return 0;
}

int cmd_experiment(const std::string& name, const std::string& config_path,
                   const std::string& out_dir) {
    CliConfig cfg = load_or_default(config_path);
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/config.json", tc::cli_config_to_json(cfg));
    const std::vector<uint64_t> seeds = {cfg.train.seed, cfg.train.seed + 1, cfg.train.seed + 2};
    if (name == "scale") {
        auto res = tc::run_scale_experiment(
            cfg.data,
            {tc::MultiScaleMode::MultiKernel, tc::MultiScaleMode::MultiDilation,
             tc::MultiScaleMode::Fixed},
            seeds);
        write_text(out_dir + "/scale.csv", res.to_csv());
        std::cout << res.to_csv();
    } else if (name == "extent") {
        auto res = tc::run_extent_experiment(cfg.data, seeds);
        write_text(out_dir + "/extent.csv", res.to_csv());
        std::cout << res.to_csv();
    } else if (name == "stacking") {
        auto res = tc::run_stacking_experiment();
        write_text(out_dir + "/stacking.csv", res.to_csv());
        std::cout << res.to_csv();
    } else {
        throw tc::ConfigError("experiment: unknown name \"" + name +
                              "\" (expected extent, scale, or stacking)");
    }
    return 0;
}

int cmd_dump_kernels(const std::string& model_path, const std::string& out) {
    tc::Model<double> model = tc::load_checkpoint_f64(model_path);
    const std::string csv = tc::kernel_dump_csv(tc::kernel_dump_rows(model.stack));
    write_text(out, csv);
    std::cout << "wrote kernel dump to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tc: temporal convolution kit"};
    app.require_subcommand(1);

    std::string config_path, data_path, out, model_path, report_path, granularity = "b", name;
    int64_t samples = -1, seed = -1, alter_seed = 0;
    bool full = false;

    auto* gen = app.add_subcommand("gen-data", "generate a synthetic feature dataset");
    gen->add_option("--config", config_path, "JSON config");
    gen->add_option("--out", out, "output TCFT file")->required();
    gen->add_option("--samples", samples, "sample count override");
    gen->add_option("--seed", seed, "generator seed override");

    auto* train = app.add_subcommand("train", "train a model");
    train->add_option("--config", config_path, "JSON config");
    train->add_option("--data", data_path, "TCFT training data")->required();
    train->add_option("--out-model", model_path, "checkpoint output path");
    train->add_option("--report", report_path, "run report output path");

    auto* ev = app.add_subcommand("eval", "evaluate a checkpoint");
    ev->add_option("--model", model_path, "checkpoint path")->required();
    ev->add_option("--data", data_path, "TCFT data")->required();
    ev->add_option("--report", report_path, "report output path");

    auto* pc = app.add_subcommand("param-count", "print the parameter accounting table");
    pc->add_option("--config", config_path, "JSON config");

    auto* alter = app.add_subcommand("alter", "resample the temporal extents of a dataset");
    alter->add_option("--data", data_path, "input TCFT file")->required();
    alter->add_option("--granularity", granularity, "a|b|c|d or named granularity");
    alter->add_option("--seed", alter_seed, "alteration seed");
    alter->add_option("--out", out, "output TCFT file")->required();

    auto* gc = app.add_subcommand("gradcheck", "run the finite-difference gradient suite");
    gc->add_flag("--full", full, "check every parameter tensor and kernel variant");

    auto* exp = app.add_subcommand("experiment", "run a named experiment");
    exp->add_option("--name", name, "extent | scale | stacking")->required();
    exp->add_option("--config", config_path, "JSON config");
    exp->add_option("--out", out, "output directory")->required();

    auto* dump = app.add_subcommand("dump-kernels", "dump temporal kernels to CSV");
    dump->add_option("--model", model_path, "checkpoint path")->required();
    dump->add_option("--out", out, "CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(config_path, out, samples, seed);
        if (train->parsed()) return cmd_train(config_path, data_path, model_path, report_path);
        if (ev->parsed()) return cmd_eval(model_path, data_path, report_path);
        if (pc->parsed()) return cmd_param_count(config_path);
        if (alter->parsed()) return cmd_alter(data_path, granularity, alter_seed, out);
        if (gc->parsed()) return cmd_gradcheck(full);
        if (exp->parsed()) return cmd_experiment(name, config_path, out);
        if (dump->parsed()) return cmd_dump_kernels(model_path, out);
    } catch (const tc::NumericError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    } catch (const tc::FormatError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 2;
    } catch (const tc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
