// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Desk-scale controlled experiments on synthetic complex-action data:
// multi-scale vs fixed kernels, extent-alteration tolerance, and the
// layer-stacking parameter growth comparison. All runs are 64-bit and
// seed-deterministic.

#ifndef TC_EXPERIMENTS_HPP
#define TC_EXPERIMENTS_HPP

#include <map>
#include <string>
#include <vector>

#include "tc/data.hpp"
#include "tc/model.hpp"
#include "tc/train.hpp"

namespace tc {

// The default desk-scale task (T=128, L=1, C=64, K=10, 1000 train / 500
// test, 60 epochs, lr 0.02).
struct DeskTask {
    int64_t t = 128;
    int64_t l = 1;
    int64_t c = 64;
    int64_t k = 10;
    int64_t train_samples = 1000;
    int64_t test_samples = 500;
    double noise_sigma = 0.1;
    uint64_t data_seed = 0;

    HParams hparams() const {
        HParams hp;
        hp.lr = 0.02;
        hp.momentum = 0.9;
        hp.weight_decay = 1e-5;
        hp.batch_size = 32;
        hp.epochs = 60;
        return hp;
    }

    ModelConfig model_config(MultiScaleMode mode) const;
    FeatureDataset make_train() const;
    FeatureDataset make_test() const;
};

struct TrainedCell {
    MultiScaleMode mode;
    uint64_t seed;
    double test_map = 0.0;
    std::vector<double> epoch_loss;
};

struct ScaleExperimentResult {
    // mode -> per-seed mAP on the (extent-randomized) test split
    std::map<std::string, std::vector<double>> map_per_seed;
    std::map<std::string, double> mean_map;
    std::map<std::string, double> std_map;
    std::string to_csv() const;
};

struct ExtentExperimentResult {
    // model ("multi" | "fixed") -> per-seed original mAP
    std::map<std::string, std::vector<double>> original_map;
    // model -> granularity -> per-seed percentage drop
    std::map<std::string, std::map<std::string, std::vector<double>>> drops;
    std::map<std::string, std::map<std::string, double>> mean_drop;
    std::map<std::string, std::map<std::string, double>> std_drop;
    std::string to_csv() const;
};

struct StackingResult {
    // label -> cumulative parameter count
    std::vector<std::pair<std::string, int64_t>> rows;
    std::string to_csv() const;
};

// Trains one model per (mode, seed) cell on the task's train split and
// scores the test split. Cells are independent jobs sharing the datasets.
std::vector<TrainedCell> run_mode_grid(const DeskTask& task, const std::vector<MultiScaleMode>& modes,
                                       const std::vector<uint64_t>& seeds, const HParams& hp,
                                       const FeatureDataset& train_set, const FeatureDataset& test_set,
                                       std::vector<Model<double>>* keep_models = nullptr);

ScaleExperimentResult run_scale_experiment(const DeskTask& task,
                                           const std::vector<MultiScaleMode>& modes,
                                           const std::vector<uint64_t>& seeds);

ExtentExperimentResult run_extent_experiment(const DeskTask& task,
                                             const std::vector<uint64_t>& seeds);

// Both experiments off one shared training grid (the acceptance path).
struct CombinedResult {
    ScaleExperimentResult scale;
    ExtentExperimentResult extent;
};
CombinedResult run_combined_experiment(const DeskTask& task, const std::vector<uint64_t>& seeds);

// Parameter accounting across stacked layers: the two reference stacks of
// the long-range study plus the comparison temporal-layer variants at
// C0=1024.
StackingResult run_stacking_experiment();

}  // namespace tc

#endif  // TC_EXPERIMENTS_HPP
