// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Timing comparison of the serial reference kernels against the
// OpenMP-parallel ones, plus a full layer forward. Results are wall-clock
// medians over repeated runs; outputs agree bitwise by construction, which
// is also asserted here.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "tc/kernels.hpp"
#include "tc/ops.hpp"
#include "tc/timeception.hpp"

namespace {

double time_median(const std::function<void()>& fn, int reps) {
    std::vector<double> times;
    for (int i = 0; i < reps; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

void report(const char* name, double serial_s, double par_s, bool bitwise_equal) {
    std::printf("%-24s serial %8.4f ms  parallel %8.4f ms  speedup %5.2fx  %s\n", name,
                serial_s * 1e3, par_s * 1e3, serial_s / par_s,
                bitwise_equal ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
    using namespace tc;
    std::printf("threads: %d\n", max_threads());
    Rng rng(1);
    const int reps = 5;

    {
        const int64_t b = 4, t = 128, q = 1, c = 512, k = 7, d = 1;
        kernels::ConvDims dims{b, t, t, q, c, k, d, -((k - 1) / 2) * d};
        Tensor<double> x = randn<double>({b, t, q, c}, rng);
        Tensor<double> w = randn<double>({k, c}, rng);
        Tensor<double> bias = randn<double>({c}, rng);
        Tensor<double> ys({b, t, q, c}), yp({b, t, q, c});
        double ts = time_median(
            [&] { kernels::depthwise_conv_fwd_serial(x.data(), w.data(), bias.data(), ys.data(), dims); },
            reps);
        double tp = time_median(
            [&] { kernels::depthwise_conv_fwd_par(x.data(), w.data(), bias.data(), yp.data(), dims); },
            reps);
        report("depthwise_conv_fwd", ts, tp, same_values(ys, yp));
    }

    {
        const int64_t rows = 4 * 128, ci = 512, co = 128;
        Tensor<double> x = randn<double>({rows, ci}, rng);
        Tensor<double> w = randn<double>({ci, co}, rng);
        Tensor<double> bias = randn<double>({co}, rng);
        Tensor<double> ys({rows, co}), yp({rows, co});
        double ts = time_median(
            [&] { kernels::matmul_bias_serial(x.data(), w.data(), bias.data(), ys.data(), rows, ci, co); },
            reps);
        double tp = time_median(
            [&] { kernels::matmul_bias_par(x.data(), w.data(), bias.data(), yp.data(), rows, ci, co); },
            reps);
        report("matmul_bias", ts, tp, same_values(ys, yp));
    }

    {
        const int64_t b = 4, t = 128, q = 1, c = 512;
        kernels::PoolDims dims{b, t, t / 2, q, c, 2, 2};
        Tensor<double> x = randn<double>({b, t, q, c}, rng);
        Tensor<double> ys({b, t / 2, q, c}), yp({b, t / 2, q, c});
        std::vector<int32_t> as(static_cast<size_t>(ys.size())), ap(as.size());
        double ts = time_median(
            [&] { kernels::maxpool_fwd_serial(x.data(), ys.data(), as.data(), dims); }, reps);
        double tp = time_median(
            [&] { kernels::maxpool_fwd_par(x.data(), yp.data(), ap.data(), dims); }, reps);
        report("maxpool_fwd", ts, tp, same_values(ys, yp));
    }

    {
        TimeceptionConfig cfg;
        cfg.num_layers = 1;
        cfg.groups = 8;
        cfg.input_channels = 512;
        Rng srng(2);
        Stack<double> stack = build_stack<double>(cfg, srng);
        Tensor<double> x = randn<double>({1, 64, 1, 1, 512}, rng);
        Tensor<double> ys, yp;
        setenv("TC_THREADS", "1", 1);
        double ts = time_median([&] { ys = forward_stack<double>(nullptr, x, stack, NormMode::Train); },
                                reps);
        unsetenv("TC_THREADS");
        double tp = time_median([&] { yp = forward_stack<double>(nullptr, x, stack, NormMode::Train); },
                                reps);
        report("layer_forward", ts, tp, same_values(ys, yp));
    }
    return 0;
}
