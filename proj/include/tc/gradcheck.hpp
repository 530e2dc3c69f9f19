// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_GRADCHECK_HPP
#define TC_GRADCHECK_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "tc/ops.hpp"
#include "tc/rng.hpp"
#include "tc/tape.hpp"

namespace tc {

// A checkable function builds a scalar loss from x; with a tape it records
// the graph, with nullptr it just evaluates. It must be deterministic and
// must not depend on mutable state across calls.
template <class S>
using ScalarFn = std::function<Tensor<S>(Tape<S>*, const Tensor<S>&)>;

struct FiniteDiffOptions {
    // Small enough that straddling a ReLU or argmax kink contributes little;
    // 64-bit roundoff is still far below it.
    double eps = 1e-4;
    // Large tensors are sampled instead of swept; 0 means check everything.
    int64_t max_coords = 64;
    uint64_t sample_seed = 0;
};

// Central-difference check of the analytic gradient of fn at x. Returns
//   max_i |analytic_i - numeric_i| / max(||analytic||_inf, 1e-8)
// over the checked coordinates, i.e. the deviation relative to the scale of
// the gradient vector, which stays meaningful at coordinates where the true
// derivative happens to vanish.
template <class S>
double finite_diff_check(const ScalarFn<S>& fn, const Tensor<S>& x,
                         const FiniteDiffOptions& opt = {}) {
    if (opt.eps <= 0) throw ConfigError("finite_diff_check: eps must be positive");

    Tape<S> tape;
    Tensor<S> leaf = tape.leaf(x);
    Tensor<S> loss = fn(&tape, leaf);
    GradStore<S> grads = tape.backward(loss);
    Tensor<S> analytic =
        grads.has(leaf.id()) ? grads.get(leaf.id()).clone() : zeros<S>(x.shape());

    std::vector<int64_t> coords;
    const int64_t n = x.size();
    if (opt.max_coords > 0 && n > opt.max_coords) {
        Rng rng(opt.sample_seed);
        for (int64_t i = 0; i < opt.max_coords; ++i)
            coords.push_back(static_cast<int64_t>(rng.uniform_int(static_cast<uint64_t>(n))));
    } else {
        coords.resize(static_cast<size_t>(n));
        for (int64_t i = 0; i < n; ++i) coords[static_cast<size_t>(i)] = i;
    }

    double grad_scale = 1e-8;
    for (int64_t i = 0; i < analytic.size(); ++i)
        grad_scale = std::max(grad_scale, std::abs(static_cast<double>(analytic.data()[i])));

    double max_abs = 0.0;
    Tensor<S> probe = x.clone();
    for (int64_t i : coords) {
        const S orig = probe.data()[i];
        probe.data()[i] = orig + static_cast<S>(opt.eps);
        const double f_plus = static_cast<double>(fn(nullptr, probe).scalar());
        probe.data()[i] = orig - static_cast<S>(opt.eps);
        const double f_minus = static_cast<double>(fn(nullptr, probe).scalar());
        probe.data()[i] = orig;
        const double numeric = (f_plus - f_minus) / (2.0 * opt.eps);
        const double a = static_cast<double>(analytic.data()[i]);
        const double diff = std::abs(a - numeric);
        if (std::isnan(diff)) return std::numeric_limits<double>::infinity();
        max_abs = std::max(max_abs, diff);
    }
    return max_abs / grad_scale;
}

}  // namespace tc

#endif  // TC_GRADCHECK_HPP
