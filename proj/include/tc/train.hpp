// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// SGD with momentum and weight decay, the training loop, and evaluation.

#ifndef TC_TRAIN_HPP
#define TC_TRAIN_HPP

#include <chrono>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "tc/data.hpp"
#include "tc/metrics.hpp"
#include "tc/model.hpp"

namespace tc {

struct HParams {
    double lr = 0.1;
    double momentum = 0.9;
    double weight_decay = 1e-5;
    int64_t batch_size = 32;
    int64_t epochs = 100;
    uint64_t seed = 0;

    void validate() const {
        if (lr < 0) throw ConfigError("hparams: lr must be >= 0");
        if (momentum < 0 || momentum >= 1) throw ConfigError("hparams: momentum must be in [0,1)");
        if (weight_decay < 0) throw ConfigError("hparams: weight decay must be >= 0");
        if (batch_size < 1 || epochs < 0) throw ConfigError("hparams: bad batch size or epochs");
    }
};

struct RunReport {
    std::vector<double> epoch_loss;
    std::vector<double> epoch_map;  // ranking quality of the training batches
    double final_map = 0.0;         // on the eval set when one is given
    double final_accuracy = 0.0;
    double wall_seconds = 0.0;
    std::string config_json;  // resolved config + seed echo
    uint64_t seed = 0;
};

// v <- momentum*v + g + wd*p (decayed tensors only); p <- p - lr*v.
template <class S>
void sgd_step(std::vector<Param<S>*>& params, const GradStore<S>& grads, const HParams& hp) {
    for (Param<S>* p : params) {
        if (p->value.id() < 0 || !grads.has(p->value.id())) continue;
        const Tensor<S>& g = grads.get(p->value.id());
        if (!g.all_finite()) throw NumericError("NaN gradient for parameter " + p->name);
        Tensor<S> v = p->velocity.clone();
        Tensor<S> value = p->value.clone();
        const S mom = static_cast<S>(hp.momentum);
        const S wd = p->decay ? static_cast<S>(hp.weight_decay) : S(0);
        const S lr = static_cast<S>(hp.lr);
        for (int64_t i = 0; i < v.size(); ++i) {
            v.data()[i] = mom * v.data()[i] + g.data()[i] + wd * value.data()[i];
            value.data()[i] -= lr * v.data()[i];
        }
        value.set_id(-1);
        p->velocity = v;
        p->value = value;
    }
}

// Multiclass labels as indices (first positive in the multi-hot vector).
inline std::vector<int64_t> label_indices(const FeatureDataset& ds,
                                          const std::vector<int64_t>& batch) {
    std::vector<int64_t> out;
    for (int64_t i : batch) {
        const auto& lab = ds.samples[static_cast<size_t>(i)].labels;
        int64_t idx = 0;
        for (size_t j = 0; j < lab.size(); ++j)
            if (lab[j]) {
                idx = static_cast<int64_t>(j);
                break;
            }
        out.push_back(idx);
    }
    return out;
}

// Eval-mode class scores for the whole dataset, batched.
template <class S>
std::vector<std::vector<double>> score_dataset(Model<S>& model, const FeatureDataset& ds,
                                               int64_t batch_size = 32) {
    std::vector<std::vector<double>> scores;
    const int64_t n = static_cast<int64_t>(ds.samples.size());
    for (int64_t i = 0; i < n; i += batch_size) {
        std::vector<int64_t> batch;
        for (int64_t j = i; j < std::min(n, i + batch_size); ++j) batch.push_back(j);
        Tensor<S> x = ds.batch_features<S>(batch);
        Tensor<S> probs = predict_scores(model, x);
        const int64_t k = probs.dim(1);
        for (int64_t r = 0; r < probs.dim(0); ++r) {
            std::vector<double> row(static_cast<size_t>(k));
            for (int64_t j = 0; j < k; ++j) row[static_cast<size_t>(j)] = static_cast<double>(probs.at(r * k + j));
            scores.push_back(std::move(row));
        }
    }
    return scores;
}

inline std::vector<std::vector<uint8_t>> dataset_labels(const FeatureDataset& ds) {
    std::vector<std::vector<uint8_t>> labels;
    labels.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) labels.push_back(s.labels);
    return labels;
}

template <class S>
double eval_map(Model<S>& model, const FeatureDataset& ds) {
    return mean_ap(score_dataset(model, ds), dataset_labels(ds)).map;
}

// One training run: seeded shuffled mini-batches, task-appropriate loss,
// per-epoch loss and training mAP in the report. `eval_set` may be null.
template <class S>
RunReport train(Model<S>& model, const FeatureDataset& ds, const HParams& hp,
                const FeatureDataset* eval_set = nullptr) {
    hp.validate();
    if (ds.samples.empty()) throw ConfigError("train: empty dataset");
    const auto t_start = std::chrono::steady_clock::now();
    RunReport report;
    report.seed = hp.seed;

    int64_t batch_size = hp.batch_size;
    const int64_t n = static_cast<int64_t>(ds.samples.size());
    if (batch_size > n) {
        std::cerr << "warning: batch size " << batch_size << " > dataset size " << n
                  << ", clamping\n";
        batch_size = n;
    }

    Rng rng(hp.seed);
    std::vector<int64_t> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), int64_t{0});

    for (int64_t epoch = 0; epoch < hp.epochs; ++epoch) {
        for (int64_t i = n - 1; i > 0; --i)
            std::swap(order[static_cast<size_t>(i)],
                      order[static_cast<size_t>(rng.uniform_int(static_cast<uint64_t>(i + 1)))]);

        double loss_acc = 0.0;
        int64_t batches = 0;
        std::vector<std::vector<double>> epoch_scores;
        std::vector<std::vector<uint8_t>> epoch_labels;
        for (int64_t i = 0; i < n; i += batch_size) {
            std::vector<int64_t> batch(order.begin() + i,
                                       order.begin() + std::min(n, i + batch_size));
            if (static_cast<int64_t>(batch.size()) < 2) continue;  // norm needs >= 2 rows
            Tape<S> tape;
            std::vector<Param<S>*> params = model.parameters();
            for (Param<S>* p : params) p->value = tape.leaf(p->value);
            Tensor<S> x = ds.batch_features<S>(batch);
            Tensor<S> logits = forward(&tape, model, x, NormMode::Train);
            Tensor<S> loss;
            if (model.config.task == Task::MultiLabel) {
                loss = bce_with_logits(&tape, logits, ds.batch_labels<S>(batch));
            } else {
                loss = softmax_ce(&tape, logits, label_indices(ds, batch));
            }
            GradStore<S> grads = tape.backward(loss);
            sgd_step(params, grads, hp);
            for (Param<S>* p : params) p->value.set_id(-1);

            loss_acc += static_cast<double>(loss.scalar());
            ++batches;
            const int64_t k = logits.dim(1);
            for (int64_t r = 0; r < logits.dim(0); ++r) {
                std::vector<double> row(static_cast<size_t>(k));
                for (int64_t j = 0; j < k; ++j)
                    row[static_cast<size_t>(j)] = static_cast<double>(logits.at(r * k + j));
                epoch_scores.push_back(std::move(row));
                epoch_labels.push_back(ds.samples[static_cast<size_t>(batch[static_cast<size_t>(r)])].labels);
            }
        }
        report.epoch_loss.push_back(batches ? loss_acc / static_cast<double>(batches) : 0.0);
        report.epoch_map.push_back(mean_ap(epoch_scores, epoch_labels).map);
    }

    if (eval_set) {
        auto scores = score_dataset(model, *eval_set);
        auto labels = dataset_labels(*eval_set);
        report.final_map = mean_ap(scores, labels).map;
        if (model.config.task == Task::MultiClass) report.final_accuracy = accuracy(scores, labels);
    } else if (!report.epoch_map.empty()) {
        report.final_map = report.epoch_map.back();
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

}  // namespace tc

#endif  // TC_TRAIN_HPP
