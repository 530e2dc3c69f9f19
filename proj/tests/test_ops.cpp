// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>

#include "tc/gradsuite.hpp"
#include "tc/ops.hpp"

using namespace tc;

namespace {

// Direct triple-loop convolution oracle, written independently of the
// kernels: walks every output element and sums over kernel taps.
Tensor<double> conv_oracle(const Tensor<double>& x, const Tensor<double>& w,
                           const Tensor<double>& b, const ConvSpec& spec) {
    const int64_t bn = x.dim(0), t = x.dim(1), c = x.dim(x.rank() - 1);
    int64_t q = 1;
    for (int64_t i = 2; i + 1 < x.rank(); ++i) q *= x.dim(i);
    const int64_t k = spec.kernel_size, d = spec.dilation;
    const bool same = spec.padding == Padding::Same;
    const int64_t t_out = same ? t : t - (k - 1) * d;
    const int64_t base = same ? -((k - 1) / 2) * d : 0;
    Shape out_shape = x.shape();
    out_shape[1] = t_out;
    Tensor<double> y(out_shape);
    for (int64_t bi = 0; bi < bn; ++bi)
        for (int64_t to = 0; to < t_out; ++to)
            for (int64_t qi = 0; qi < q; ++qi)
                for (int64_t ci = 0; ci < c; ++ci) {
                    double acc = b.data()[ci];
                    for (int64_t j = 0; j < k; ++j) {
                        const int64_t ti = to + base + j * d;
                        if (ti < 0 || ti >= t) continue;
                        acc += w.data()[j * c + ci] * x.data()[((bi * t + ti) * q + qi) * c + ci];
                    }
                    y.data()[((bi * t_out + to) * q + qi) * c + ci] = acc;
                }
    return y;
}

Tensor<double> pool_oracle(const Tensor<double>& x, const PoolSpec& spec) {
    const int64_t bn = x.dim(0), t = x.dim(1), c = x.dim(x.rank() - 1);
    int64_t q = 1;
    for (int64_t i = 2; i + 1 < x.rank(); ++i) q *= x.dim(i);
    const int64_t k = spec.kernel_size, s = spec.stride;
    const bool same = spec.padding == Padding::Same;
    const int64_t t_out = same ? (t + s - 1) / s : (t - k) / s + 1;
    Shape out_shape = x.shape();
    out_shape[1] = t_out;
    Tensor<double> y(out_shape);
    for (int64_t bi = 0; bi < bn; ++bi)
        for (int64_t to = 0; to < t_out; ++to)
            for (int64_t qi = 0; qi < q; ++qi)
                for (int64_t ci = 0; ci < c; ++ci) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (int64_t j = 0; j < k; ++j) {
                        const int64_t ti = to * s + j;
                        if (ti >= t) break;
                        best = std::max(best, x.data()[((bi * t + ti) * q + qi) * c + ci]);
                    }
                    y.data()[((bi * t_out + to) * q + qi) * c + ci] = best;
                }
    return y;
}

Tensor<double> t5(std::vector<double> vals) {  // [1,T,1,1,1]
    return from_vector<double>({1, static_cast<int64_t>(vals.size()), 1, 1, 1}, vals);
}

}  // namespace

TEST_CASE("depthwise conv: identity kernel") {
    Rng rng(1);
    auto x = randn<double>({2, 7, 2, 2, 3}, rng);
    auto w = from_vector<double>({3, 3}, {0, 0, 0, 1, 1, 1, 0, 0, 0});
    auto b = zeros<double>({3});
    auto y = depthwise_temporal_conv<double>(nullptr, x, w, b, {3, 1, Padding::Same});
    CHECK(same_values(x, y));
}

TEST_CASE("depthwise conv: dilated shift kernel") {
    auto x = t5({1, 2, 3, 4, 5});
    auto w = from_vector<double>({3, 1}, {1, 0, 0});
    auto b = zeros<double>({1});
    auto y = depthwise_temporal_conv<double>(nullptr, x, w, b, {3, 2, Padding::Same});
    const std::vector<double> expect = {0, 0, 1, 2, 3};
    for (int i = 0; i < 5; ++i) CHECK(y.data()[i] == expect[static_cast<size_t>(i)]);
}

TEST_CASE("depthwise conv: errors") {
    Rng rng(2);
    auto x = randn<double>({1, 4, 1, 1, 2}, rng);
    auto w = randn<double>({4, 2}, rng);
    auto b = zeros<double>({2});
    CHECK_THROWS_AS(depthwise_temporal_conv<double>(nullptr, x, w, b, {4, 1, Padding::Same}),
                    ConfigError);
    auto w3 = randn<double>({3, 2}, rng);
    CHECK_THROWS_AS(depthwise_temporal_conv<double>(nullptr, x, w3, b, {3, 2, Padding::Valid}),
                    ConfigError);  // field 5 > T=4
    auto wbad = randn<double>({3, 5}, rng);
    CHECK_THROWS_AS(depthwise_temporal_conv<double>(nullptr, x, wbad, b, {3, 1, Padding::Same}),
                    ShapeError);
}

TEST_CASE("depthwise conv: 100 random instances vs brute-force oracle") {
    Rng rng(42);
    int done = 0;
    while (done < 100) {
        const int64_t bn = 1 + static_cast<int64_t>(rng.uniform_int(2));
        const int64_t t = 1 + static_cast<int64_t>(rng.uniform_int(16));
        const int64_t c = 1 + static_cast<int64_t>(rng.uniform_int(8));
        const int64_t k = 3 + 2 * static_cast<int64_t>(rng.uniform_int(3));
        const int64_t d = 1 + static_cast<int64_t>(rng.uniform_int(3));
        const Padding pad = rng.uniform() < 0.5 ? Padding::Same : Padding::Valid;
        if (pad == Padding::Valid && (k - 1) * d + 1 > t) continue;
        auto x = randn<double>({bn, t, 1, 1, c}, rng);
        auto w = randn<double>({k, c}, rng);
        auto b = randn<double>({c}, rng);
        ConvSpec spec{k, d, pad};
        auto y = depthwise_temporal_conv<double>(nullptr, x, w, b, spec);
        auto o = conv_oracle(x, w, b, spec);
        REQUIRE(y.shape() == o.shape());
        CHECK(max_abs_diff(y, o) <= 1e-12);
        ++done;
    }
}

TEST_CASE("depthwise conv: all k,d covered, both paddings") {
    Rng rng(7);
    for (int64_t k : {3, 5, 7})
        for (int64_t d : {1, 2, 3})
            for (Padding pad : {Padding::Same, Padding::Valid}) {
                const int64_t t = 24;
                auto x = randn<double>({2, t, 1, 1, 4}, rng);
                auto w = randn<double>({k, 4}, rng);
                auto b = randn<double>({4}, rng);
                ConvSpec spec{k, d, pad};
                auto y = depthwise_temporal_conv<double>(nullptr, x, w, b, spec);
                CHECK(max_abs_diff(y, conv_oracle(x, w, b, spec)) <= 1e-12);
            }
}

TEST_CASE("depthwise conv: channel isolation") {
    Rng rng(9);
    auto x = randn<double>({1, 8, 1, 1, 4}, rng);
    auto w = randn<double>({3, 4}, rng);
    auto b = randn<double>({4}, rng);
    ConvSpec spec{3, 1, Padding::Same};
    auto y0 = depthwise_temporal_conv<double>(nullptr, x, w, b, spec);
    auto x2 = x.clone();
    for (int64_t t = 0; t < 8; ++t) x2.data()[t * 4 + 2] += 1.0;  // bump channel 2 only
    auto y2 = depthwise_temporal_conv<double>(nullptr, x2, w, b, spec);
    for (int64_t t = 0; t < 8; ++t)
        for (int64_t c = 0; c < 4; ++c) {
            if (c == 2) continue;
            CHECK(y0.data()[t * 4 + c] == y2.data()[t * 4 + c]);
        }
}

TEST_CASE("temporal ops: H,W permutation equivariance") {
    Rng rng(10);
    auto x = randn<double>({1, 6, 2, 2, 3}, rng);
    // swap spatial positions (h,w)=(0,0) and (1,1)
    auto permute = [](const Tensor<double>& in) {
        auto out = in.clone();
        const int64_t t_len = in.dim(1), c = in.dim(4);
        for (int64_t t = 0; t < t_len; ++t)
            for (int64_t ci = 0; ci < c; ++ci) {
                const int64_t q = 4;  // H*W
                const int64_t i00 = (t * q + 0) * c + ci;
                const int64_t i11 = (t * q + 3) * c + ci;
                std::swap(out.data()[i00], out.data()[i11]);
            }
        return out;
    };
    auto w = randn<double>({3, 3}, rng);
    auto b = randn<double>({3}, rng);
    ConvSpec spec{3, 1, Padding::Same};
    auto y_perm_in = depthwise_temporal_conv<double>(nullptr, permute(x), w, b, spec);
    auto y_perm_out = permute(depthwise_temporal_conv<double>(nullptr, x, w, b, spec));
    CHECK(same_values(y_perm_in, y_perm_out));

    PoolSpec pspec{2, 2, Padding::Same};
    auto p_in = temporal_max_pool<double>(nullptr, permute(x), pspec);
    auto p_out = permute(temporal_max_pool<double>(nullptr, x, pspec));
    CHECK(same_values(p_in, p_out));
}

TEST_CASE("pointwise conv: identity and channel sum") {
    Rng rng(11);
    auto x = randn<double>({2, 3, 4}, rng);
    auto id = zeros<double>({4, 4});
    for (int i = 0; i < 4; ++i) id.data()[i * 4 + i] = 1.0;
    auto y = pointwise_conv<double>(nullptr, x, id, zeros<double>({4}));
    CHECK(same_values(x, y));

    auto x2 = from_vector<double>({1, 2}, {3, 4});
    auto w = from_vector<double>({2, 1}, {1, 1});
    auto y2 = pointwise_conv<double>(nullptr, x2, w, zeros<double>({1}));
    CHECK(y2.data()[0] == 7.0);
}

TEST_CASE("pointwise conv and dense: matmul oracle") {
    Rng rng(12);
    auto x = randn<double>({3, 5, 4}, rng);
    auto w = randn<double>({4, 6}, rng);
    auto b = randn<double>({6}, rng);
    auto y = pointwise_conv<double>(nullptr, x, w, b);
    for (int64_t r = 0; r < 15; ++r)
        for (int64_t co = 0; co < 6; ++co) {
            double acc = b.data()[co];
            for (int64_t ci = 0; ci < 4; ++ci) acc += x.data()[r * 4 + ci] * w.data()[ci * 6 + co];
            CHECK(std::abs(y.data()[r * 6 + co] - acc) <= 1e-12);
        }
    auto xf = x.reshaped({15, 4});
    auto yd = dense<double>(nullptr, xf, w, b);
    CHECK(same_values(yd, y.reshaped({15, 6})));
}

TEST_CASE("max pool: worked examples") {
    auto x = t5({1, 3, 2});
    auto y = temporal_max_pool<double>(nullptr, x, {2, 1, Padding::Same});
    CHECK(y.dim(1) == 3);
    CHECK(y.data()[0] == 3);
    CHECK(y.data()[1] == 3);
    CHECK(y.data()[2] == 2);

    auto x2 = t5({1, 3, 2, 5});
    auto y2 = temporal_max_pool<double>(nullptr, x2, {2, 2, Padding::Same});
    CHECK(y2.dim(1) == 2);
    CHECK(y2.data()[0] == 3);
    CHECK(y2.data()[1] == 5);

    CHECK_THROWS_AS(temporal_max_pool<double>(nullptr, x, {5, 1, Padding::Valid}), ConfigError);
}

TEST_CASE("max pool: 100 random instances vs loop oracle") {
    Rng rng(13);
    for (int i = 0; i < 100; ++i) {
        const int64_t bn = 1 + static_cast<int64_t>(rng.uniform_int(2));
        const int64_t t = 1 + static_cast<int64_t>(rng.uniform_int(16));
        const int64_t c = 1 + static_cast<int64_t>(rng.uniform_int(6));
        const int64_t k = 1 + static_cast<int64_t>(rng.uniform_int(3));
        const int64_t s = 1 + static_cast<int64_t>(rng.uniform_int(3));
        Padding pad = rng.uniform() < 0.5 ? Padding::Same : Padding::Valid;
        if (pad == Padding::Valid && k > t) pad = Padding::Same;
        auto x = randn<double>({bn, t, 1, 1, c}, rng);
        PoolSpec spec{k, s, pad};
        auto y = temporal_max_pool<double>(nullptr, x, spec);
        auto o = pool_oracle(x, spec);
        REQUIRE(y.shape() == o.shape());
        CHECK(same_values(y, o));
    }
}

TEST_CASE("same conv and k2s1 pool preserve T for all T >= 1") {
    Rng rng(14);
    for (int64_t t = 1; t <= 9; ++t) {
        auto x = randn<double>({1, t, 1, 1, 2}, rng);
        auto w = randn<double>({3, 2}, rng);
        auto y = depthwise_temporal_conv<double>(nullptr, x, w, zeros<double>({2}),
                                                 {3, 1, Padding::Same});
        CHECK(y.dim(1) == t);
        auto p = temporal_max_pool<double>(nullptr, x, {2, 1, Padding::Same});
        CHECK(p.dim(1) == t);
    }
}

TEST_CASE("channel shuffle: interleave permutation") {
    auto x = from_vector<double>({1, 6}, {0, 1, 2, 3, 4, 5});
    auto y = channel_shuffle<double>(nullptr, x, 2);
    const std::vector<double> expect = {0, 3, 1, 4, 2, 5};
    for (int i = 0; i < 6; ++i) CHECK(y.data()[i] == expect[static_cast<size_t>(i)]);

    auto y1 = channel_shuffle<double>(nullptr, x, 1);
    CHECK(same_values(x, y1));

    CHECK_THROWS_AS(channel_shuffle<double>(nullptr, x, 4), ConfigError);
}

TEST_CASE("channel shuffle: bijection and histogram preservation") {
    const int64_t c = 12, n = 3;
    auto perm = shuffle_permutation(c, n);
    std::vector<bool> seen(static_cast<size_t>(c), false);
    for (int64_t j : perm) {
        CHECK(j >= 0);
        CHECK(j < c);
        CHECK(!seen[static_cast<size_t>(j)]);
        seen[static_cast<size_t>(j)] = true;
    }
    // composing with the inverse permutation yields identity
    Rng rng(15);
    auto x = randn<double>({2, 3, c}, rng);
    auto y = channel_shuffle<double>(nullptr, x, n);
    std::vector<int64_t> inv(static_cast<size_t>(c));
    for (int64_t j = 0; j < c; ++j) inv[static_cast<size_t>(perm[static_cast<size_t>(j)])] = j;
    auto back = x.clone();
    for (int64_t r = 0; r < 6; ++r)
        for (int64_t j = 0; j < c; ++j)
            back.data()[r * c + perm[static_cast<size_t>(j)]] = y.data()[r * c + j];
    CHECK(same_values(back, x));
}

TEST_CASE("channel permute: seeded random permutation round trip") {
    const int64_t c = 10;
    Rng r1(21), r2(21), r3(22);
    auto p1 = random_permutation(c, r1);
    auto p2 = random_permutation(c, r2);
    auto p3 = random_permutation(c, r3);
    CHECK(p1 == p2);
    CHECK(p1 != p3);
    std::vector<bool> seen(static_cast<size_t>(c), false);
    for (int64_t j : p1) {
        CHECK(!seen[static_cast<size_t>(j)]);
        seen[static_cast<size_t>(j)] = true;
    }
    Rng rng(23);
    auto x = randn<double>({3, 2, c}, rng);
    auto y = channel_permute<double>(nullptr, x, p1);
    std::vector<int64_t> inv(static_cast<size_t>(c));
    for (int64_t j = 0; j < c; ++j) inv[static_cast<size_t>(p1[static_cast<size_t>(j)])] = j;
    auto back = channel_permute<double>(nullptr, y, inv);
    CHECK(same_values(back, x));
    CHECK_THROWS_AS(channel_permute<double>(nullptr, x, std::vector<int64_t>{0, 1}), ShapeError);
}

TEST_CASE("split/concat round trip") {
    Rng rng(16);
    auto x = randn<double>({2, 5, 8}, rng);
    auto parts = channel_split<double>(nullptr, x, 4);
    REQUIRE(parts.size() == 4);
    for (const auto& p : parts) CHECK(p.dim(2) == 2);
    auto y = channel_concat<double>(nullptr, parts);
    CHECK(same_values(x, y));
    CHECK_THROWS_AS(channel_split<double>(nullptr, x, 3), ConfigError);
    // split assigns group n channels [n C/N, (n+1) C/N)
    for (int64_t g = 0; g < 4; ++g)
        for (int64_t r = 0; r < 10; ++r)
            for (int64_t j = 0; j < 2; ++j)
                CHECK(parts[static_cast<size_t>(g)].data()[r * 2 + j] ==
                      x.data()[r * 8 + g * 2 + j]);
}

TEST_CASE("batch norm: normalization and constant channel") {
    Rng rng(17);
    auto x = randn<double>({8, 6, 3}, rng);
    // make channel 1 constant
    for (int64_t r = 0; r < 48; ++r) x.data()[r * 3 + 1] = 4.2;
    auto gamma = full<double>({3}, 1.0);
    auto beta = from_vector<double>({3}, {0.0, 0.7, 0.0});
    BatchNormState<double> st(3);
    auto y = batch_norm<double>(nullptr, x, gamma, beta, st, NormMode::Train);
    for (int64_t c : {0, 2}) {
        double m = 0, v = 0;
        for (int64_t r = 0; r < 48; ++r) m += y.data()[r * 3 + c];
        m /= 48;
        for (int64_t r = 0; r < 48; ++r) v += (y.data()[r * 3 + c] - m) * (y.data()[r * 3 + c] - m);
        v /= 48;
        CHECK(std::abs(m) < 1e-5);
        CHECK(std::abs(v - 1.0) < 1e-4);
    }
    for (int64_t r = 0; r < 48; ++r) CHECK(std::abs(y.data()[r * 3 + 1] - 0.7) < 1e-2);
    CHECK(st.trained);

    // eval mode then uses running stats and is deterministic
    auto e1 = batch_norm<double>(nullptr, x, gamma, beta, st, NormMode::Eval);
    auto e2 = batch_norm<double>(nullptr, x, gamma, beta, st, NormMode::Eval);
    CHECK(same_values(e1, e2));

    CHECK_THROWS_AS(batch_norm<double>(nullptr, randn<double>({1, 3}, rng), full<double>({3}, 1.0),
                                       zeros<double>({3}), st, NormMode::Train),
                    ConfigError);
}

TEST_CASE("losses: worked values") {
    auto z = zeros<double>({2, 2});
    auto t = full<double>({2, 2}, 1.0);
    auto loss = bce_with_logits<double>(nullptr, z, t);
    CHECK(loss.scalar() == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    auto zs = from_vector<double>({1, 2}, {30.0, -30.0});
    auto ts = from_vector<double>({1, 2}, {1.0, 0.0});
    CHECK(bce_with_logits<double>(nullptr, zs, ts).scalar() < 1e-10);

    auto bad_t = from_vector<double>({1, 2}, {0.5, 1.0});
    CHECK_THROWS_AS(bce_with_logits<double>(nullptr, zs, bad_t), ConfigError);

    // uniform logits, K classes -> ln K
    auto zu = zeros<double>({2, 4});
    CHECK(softmax_ce<double>(nullptr, zu, {1, 3}).scalar() ==
          doctest::Approx(std::log(4.0)).epsilon(1e-12));
    CHECK_THROWS_AS(softmax_ce<double>(nullptr, zu, {1, 7}), ConfigError);
}

TEST_CASE("losses: naive-formula oracle") {
    Rng rng(18);
    for (int i = 0; i < 50; ++i) {
        auto z = randn<double>({3, 4}, rng);
        for (int64_t j = 0; j < z.size(); ++j) z.data()[j] *= 10;  // |logit| mostly <= 30
        Tensor<double> t({3, 4});
        for (int64_t j = 0; j < t.size(); ++j) t.data()[j] = rng.uniform() < 0.5 ? 0.0 : 1.0;
        double naive = 0;
        for (int64_t j = 0; j < z.size(); ++j) {
            // sigmoid and its complement, each in direct form (the 1-p
            // subtraction would cancel catastrophically near |z|=30)
            const double p = 1.0 / (1.0 + std::exp(-z.data()[j]));
            const double q = 1.0 / (1.0 + std::exp(z.data()[j]));
            naive += -(t.data()[j] * std::log(p) + (1 - t.data()[j]) * std::log(q));
        }
        naive /= static_cast<double>(z.size());
        CHECK(std::abs(bce_with_logits<double>(nullptr, z, t).scalar() - naive) <= 1e-10);
    }
    for (int i = 0; i < 50; ++i) {
        auto z = randn<double>({3, 5}, rng);
        std::vector<int64_t> labels;
        for (int j = 0; j < 3; ++j) labels.push_back(static_cast<int64_t>(rng.uniform_int(5)));
        double naive = 0;
        for (int64_t bi = 0; bi < 3; ++bi) {
            double denom = 0;
            for (int64_t kk = 0; kk < 5; ++kk) denom += std::exp(z.data()[bi * 5 + kk]);
            naive += -std::log(std::exp(z.data()[bi * 5 + labels[static_cast<size_t>(bi)]]) / denom);
        }
        naive /= 3.0;
        CHECK(std::abs(softmax_ce<double>(nullptr, z, labels).scalar() - naive) <= 1e-10);
    }
}

TEST_CASE("relu and spatial average pool") {
    auto x = from_vector<double>({1, 3}, {-1, 0, 2});
    auto y = relu<double>(nullptr, x);
    CHECK(y.data()[0] == 0);
    CHECK(y.data()[1] == 0);
    CHECK(y.data()[2] == 2);

    auto s = full<double>({2, 3, 2, 2, 4}, 7.0);
    auto p = spatial_avg_pool<double>(nullptr, s);
    CHECK(p.shape() == Shape{2, 3, 4});
    for (int64_t i = 0; i < p.size(); ++i) CHECK(p.data()[i] == 7.0);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
    Rng rng(19);
    const int64_t bn = 2, t = 16, q = 2, c = 8, k = 5, d = 2;
    kernels::ConvDims dims{bn, t, t, q, c, k, d, -((k - 1) / 2) * d};
    auto x = randn<double>({bn, t, q, c}, rng);
    auto w = randn<double>({k, c}, rng);
    auto b = randn<double>({c}, rng);
    Tensor<double> ys({bn, t, q, c}), yp({bn, t, q, c});
    kernels::depthwise_conv_fwd_serial(x.data(), w.data(), b.data(), ys.data(), dims);
    kernels::depthwise_conv_fwd_par(x.data(), w.data(), b.data(), yp.data(), dims);
    CHECK(same_values(ys, yp));

    Tensor<double> gxs({bn, t, q, c}), gxp({bn, t, q, c});
    kernels::depthwise_conv_bwd_x_serial(ys.data(), w.data(), gxs.data(), dims);
    kernels::depthwise_conv_bwd_x_par(ys.data(), w.data(), gxp.data(), dims);
    CHECK(same_values(gxs, gxp));

    Tensor<double> gws({k, c}), gwp({k, c});
    kernels::depthwise_conv_bwd_w_serial(ys.data(), x.data(), gws.data(), dims);
    kernels::depthwise_conv_bwd_w_par(ys.data(), x.data(), gwp.data(), dims);
    CHECK(same_values(gws, gwp));

    const int64_t rows = 32, ci = 8, co = 6;
    auto mx = randn<double>({rows, ci}, rng);
    auto mw = randn<double>({ci, co}, rng);
    auto mb = randn<double>({co}, rng);
    Tensor<double> ms({rows, co}), mp({rows, co});
    kernels::matmul_bias_serial(mx.data(), mw.data(), mb.data(), ms.data(), rows, ci, co);
    kernels::matmul_bias_par(mx.data(), mw.data(), mb.data(), mp.data(), rows, ci, co);
    CHECK(same_values(ms, mp));

    kernels::PoolDims pd{bn, t, t / 2, q, c, 2, 2};
    Tensor<double> ps({bn, t / 2, q, c}), pp({bn, t / 2, q, c});
    std::vector<int32_t> as(static_cast<size_t>(ps.size())), ap(as.size());
    kernels::maxpool_fwd_serial(x.data(), ps.data(), as.data(), pd);
    kernels::maxpool_fwd_par(x.data(), pp.data(), ap.data(), pd);
    CHECK(same_values(ps, pp));
    CHECK(as == ap);
}

TEST_CASE("gradient suite: every op under 1e-4") {
    for (const auto& gc : run_gradient_suite(false)) {
        INFO(gc.name);
        CHECK(gc.rel_err < gc.tol);
    }
}
