// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tc/experiments.hpp"

#include <cmath>
#include <sstream>

namespace tc {

namespace {

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

ModelConfig DeskTask::model_config(MultiScaleMode mode) const {
    ModelConfig cfg;
    cfg.input_timesteps = t;
    cfg.spatial = l;
    cfg.tc.num_layers = 2;
    cfg.tc.groups = 4;
    cfg.tc.reduction = 4;
    cfg.tc.mode = mode;
    cfg.tc.input_channels = c;
    cfg.hidden = 64;
    cfg.classes = k;
    cfg.task = Task::MultiLabel;
    return cfg;
}

FeatureDataset DeskTask::make_train() const {
    Rng rng(data_seed);
    FeatureDataset ds = synth_generate(default_motifs(k, c, t), train_samples, t, l, c, noise_sigma, rng);
    ds.seed = data_seed;
    return ds;
}

FeatureDataset DeskTask::make_test() const {
    Rng rng(data_seed + 1);
    FeatureDataset ds = synth_generate(default_motifs(k, c, t), test_samples, t, l, c, noise_sigma, rng);
    ds.seed = data_seed + 1;
    return ds;
}

std::vector<TrainedCell> run_mode_grid(const DeskTask& task, const std::vector<MultiScaleMode>& modes,
                                       const std::vector<uint64_t>& seeds, const HParams& hp,
                                       const FeatureDataset& train_set, const FeatureDataset& test_set,
                                       std::vector<Model<double>>* keep_models) {
    std::vector<TrainedCell> cells;
    for (MultiScaleMode mode : modes)
        for (uint64_t seed : seeds) {
            ModelConfig cfg = task.model_config(mode);
            Rng init_rng(seed);
            Model<double> model = build_model<double>(cfg, init_rng);
            HParams hp_cell = hp;
            hp_cell.seed = seed;
            RunReport report = train(model, train_set, hp_cell, &test_set);
            TrainedCell cell;
            cell.mode = mode;
            cell.seed = seed;
            cell.test_map = report.final_map;
            cell.epoch_loss = report.epoch_loss;
            cells.push_back(std::move(cell));
            if (keep_models) keep_models->push_back(std::move(model));
        }
    return cells;
}

namespace {

// The scale comparison is scored on the extent-randomized test split, so
// duration variation at test time is part of the task.
ScaleExperimentResult assemble_scale(const std::vector<TrainedCell>& cells,
                                     std::vector<Model<double>>& models,
                                     const FeatureDataset& randomized_test) {
    ScaleExperimentResult result;
    for (size_t i = 0; i < cells.size(); ++i)
        result.map_per_seed[mode_name(cells[i].mode)].push_back(
            eval_map(models[i], randomized_test));
    for (const auto& [mode, maps] : result.map_per_seed) {
        result.mean_map[mode] = mean_of(maps);
        result.std_map[mode] = std_of(maps);
    }
    return result;
}

}  // namespace

ScaleExperimentResult run_scale_experiment(const DeskTask& task,
                                           const std::vector<MultiScaleMode>& modes,
                                           const std::vector<uint64_t>& seeds) {
    const FeatureDataset train_set = task.make_train();
    const FeatureDataset test_set = task.make_test();
    const FeatureDataset randomized = randomize_extents(test_set, task.data_seed + 2);
    std::vector<Model<double>> models;
    std::vector<TrainedCell> cells =
        run_mode_grid(task, modes, seeds, task.hparams(), train_set, test_set, &models);
    return assemble_scale(cells, models, randomized);
}

namespace {

ExtentExperimentResult assemble_extent(const DeskTask& task, const std::vector<TrainedCell>& cells,
                                       std::vector<Model<double>>& models,
                                       const FeatureDataset& test_set) {
    ExtentExperimentResult result;
    const Granularity grans[4] = {Granularity::VeryCoarse, Granularity::Coarse, Granularity::Fine,
                                  Granularity::VeryFine};
    // Altered test sets are shared across models; the alteration seed is the
    // granularity index so reruns are bit-identical.
    std::vector<FeatureDataset> altered;
    for (int gi = 0; gi < 4; ++gi)
        altered.push_back(alter_extents(test_set, AlterationSpec{grans[gi], static_cast<uint64_t>(gi)}));

    for (size_t i = 0; i < cells.size(); ++i) {
        const std::string label =
            cells[i].mode == MultiScaleMode::Fixed ? "fixed" : "multi";
        const double orig = cells[i].test_map;
        result.original_map[label].push_back(orig);
        for (int gi = 0; gi < 4; ++gi) {
            const double alt = eval_map(models[i], altered[static_cast<size_t>(gi)]);
            const double drop = (orig - alt) / orig * 100.0;
            result.drops[label][granularity_name(grans[gi])].push_back(drop);
        }
    }
    for (const auto& [label, per_gran] : result.drops)
        for (const auto& [gran, drops] : per_gran) {
            result.mean_drop[label][gran] = mean_of(drops);
            result.std_drop[label][gran] = std_of(drops);
        }
    (void)task;
    return result;
}

}  // namespace

ExtentExperimentResult run_extent_experiment(const DeskTask& task,
                                             const std::vector<uint64_t>& seeds) {
    const FeatureDataset train_set = task.make_train();
    const FeatureDataset test_set = task.make_test();
    std::vector<Model<double>> models;
    const std::vector<MultiScaleMode> modes{MultiScaleMode::MultiKernel, MultiScaleMode::Fixed};
    std::vector<TrainedCell> cells =
        run_mode_grid(task, modes, seeds, task.hparams(), train_set, test_set, &models);
    return assemble_extent(task, cells, models, test_set);
}

CombinedResult run_combined_experiment(const DeskTask& task, const std::vector<uint64_t>& seeds) {
    const FeatureDataset train_set = task.make_train();
    const FeatureDataset test_set = task.make_test();
    const std::vector<MultiScaleMode> modes{MultiScaleMode::MultiKernel, MultiScaleMode::MultiDilation,
                                            MultiScaleMode::Fixed};
    std::vector<Model<double>> models;
    std::vector<TrainedCell> cells =
        run_mode_grid(task, modes, seeds, task.hparams(), train_set, test_set, &models);

    CombinedResult result;
    const FeatureDataset randomized = randomize_extents(test_set, task.data_seed + 2);
    result.scale = assemble_scale(cells, models, randomized);

    // Extent tolerance uses only the multi-kernel and fixed cells.
    std::vector<TrainedCell> subset;
    std::vector<Model<double>> subset_models;
    for (size_t i = 0; i < cells.size(); ++i)
        if (cells[i].mode != MultiScaleMode::MultiDilation) {
            subset.push_back(cells[i]);
            subset_models.push_back(std::move(models[i]));
        }
    result.extent = assemble_extent(task, subset, subset_models, test_set);
    return result;
}

StackingResult run_stacking_experiment() {
    StackingResult result;
    // The two reference stacks of the long-range study (head widths 512/157;
    // 3-layer stacks see 32 input timesteps, 4-layer stacks 128).
    for (const auto& [label, c0, groups] :
         {std::tuple<std::string, int64_t, int64_t>{"resnet", 2048, 16},
          std::tuple<std::string, int64_t, int64_t>{"i3d", 1024, 8}}) {
        for (int64_t layers : {3, 4}) {
            TimeceptionConfig cfg;
            cfg.num_layers = layers;
            cfg.groups = groups;
            cfg.reduction = 4;
            cfg.mode = MultiScaleMode::MultiKernel;
            cfg.input_channels = c0;
            HeadConfig head{layers == 3 ? 32 : 128, 512, 157};
            result.rows.emplace_back(label + "+" + std::to_string(layers) + "tc",
                                     count_params(cfg, head).total);
        }
    }
    // Comparison variants at C0=1024 over 4 layers (stack weights only).
    TimeceptionConfig tc_cfg;
    tc_cfg.num_layers = 4;
    tc_cfg.groups = 8;
    tc_cfg.reduction = 4;
    tc_cfg.mode = MultiScaleMode::MultiKernel;
    tc_cfg.input_channels = 1024;
    result.rows.emplace_back("timeception_4l_c1024",
                             count_params(tc_cfg, HeadConfig{128, 512, 157}).stack_total());
    result.rows.emplace_back("grouped_shuffle_matched_4l_c1024",
                             count_params_grouped_shuffle_matched(1024, 4, 8));
    result.rows.emplace_back("grouped_shuffle_4l_c1024",
                             count_params_variant(TemporalLayerVariant::GroupedShuffle, 1024, 4));
    result.rows.emplace_back("grouped_pointwise_4l_c1024",
                             count_params_variant(TemporalLayerVariant::GroupedPointwise, 1024, 4));
    result.rows.emplace_back("separable_4l_c1024",
                             count_params_variant(TemporalLayerVariant::SeparableTC, 1024, 4));
    return result;
}

std::string ScaleExperimentResult::to_csv() const {
    std::ostringstream os;
    os << "mode,seed_index,map\n";
    for (const auto& [mode, maps] : map_per_seed)
        for (size_t i = 0; i < maps.size(); ++i) os << mode << "," << i << "," << maps[i] << "\n";
    os << "mode,mean_map,std_map\n";
    for (const auto& [mode, m] : mean_map) os << mode << "," << m << "," << std_map.at(mode) << "\n";
    return os.str();
}

std::string ExtentExperimentResult::to_csv() const {
    std::ostringstream os;
    os << "model,granularity,mean_drop_pct,std_drop_pct\n";
    for (const auto& [label, per_gran] : mean_drop)
        for (const auto& [gran, m] : per_gran)
            os << label << "," << gran << "," << m << "," << std_drop.at(label).at(gran) << "\n";
    return os.str();
}

std::string StackingResult::to_csv() const {
    std::ostringstream os;
    os << "config,params\n";
    for (const auto& [label, count] : rows) os << label << "," << count << "\n";
    return os.str();
}

}  // namespace tc
