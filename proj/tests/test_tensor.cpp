// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "tc/gradcheck.hpp"
#include "tc/rng.hpp"
#include "tc/tape.hpp"
#include "tc/tensor.hpp"

using namespace tc;

TEST_CASE("shape helpers") {
    CHECK(shape_size({2, 3, 4}) == 24);
    CHECK(shape_size({1}) == 1);
    CHECK_THROWS_AS(check_shape_valid({}), ShapeError);
    CHECK_THROWS_AS(check_shape_valid({2, 0, 3}), ShapeError);
    CHECK(strides_of({2, 3, 4}) == Shape{12, 4, 1});
}

TEST_CASE("zeros, full, from_vector") {
    auto z = zeros<double>({2, 3});
    for (int64_t i = 0; i < z.size(); ++i) CHECK(z.data()[i] == 0.0);
    auto f = full<float>({4}, 2.5f);
    for (int64_t i = 0; i < f.size(); ++i) CHECK(f.data()[i] == 2.5f);
    auto v = from_vector<double>({2, 2}, {1, 2, 3, 4});
    CHECK(v.data()[3] == 4.0);
    CHECK_THROWS_AS(from_vector<double>({2, 2}, {1, 2, 3}), ShapeError);
}

TEST_CASE("rng determinism and portability") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c(42), d(43);
    CHECK(c.next_u64() != d.next_u64());
    // same stream regardless of platform: spot-check the seeding path is
    // stable across runs of this process
    Rng e(42);
    uint64_t first = e.next_u64();
    Rng f(42);
    CHECK(f.next_u64() == first);
}

TEST_CASE("randn determinism and law of large numbers") {
    Rng r1(7), r2(7);
    auto x1 = randn<double>({100}, r1);
    auto x2 = randn<double>({100}, r2);
    CHECK(same_values(x1, x2));

    Rng r3(123);
    const int64_t n = 1000000;
    auto big = randn<double>({n}, r3);
    double mean = 0;
    for (int64_t i = 0; i < n; ++i) mean += big.data()[i];
    mean /= static_cast<double>(n);
    CHECK(mean > -0.01);
    CHECK(mean < 0.01);
    double var = 0;
    for (int64_t i = 0; i < n; ++i) var += (big.data()[i] - mean) * (big.data()[i] - mean);
    var /= static_cast<double>(n);
    CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("uniform and fork") {
    Rng r(9);
    for (int i = 0; i < 1000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        uint64_t k = r.uniform_int(10);
        CHECK(k < 10);
    }
    Rng base(5);
    Rng f1 = base.fork(1), f2 = base.fork(2);
    CHECK(f1.next_u64() != f2.next_u64());
}

TEST_CASE("reshape round trip") {
    Rng r(3);
    auto x = randn<double>({2, 3, 4}, r);
    auto y = x.reshaped({4, 6});
    CHECK(y.shape() == Shape{4, 6});
    auto z = y.reshaped({2, 3, 4});
    CHECK(same_values(x, z));
    CHECK_THROWS_AS(x.reshaped({5, 5}), ShapeError);
}

TEST_CASE("clone is independent") {
    auto x = from_vector<double>({2}, {1, 2});
    auto y = x.clone();
    y.data()[0] = 9;
    CHECK(x.data()[0] == 1.0);
}

TEST_CASE("scalar accessor") {
    auto s = full<double>({1}, 3.5);
    CHECK(s.scalar() == 3.5);
    CHECK_THROWS_AS(zeros<double>({2}).scalar(), ShapeError);
}

TEST_CASE("all_finite") {
    auto x = from_vector<double>({2}, {1, 2});
    CHECK(x.all_finite());
    x.data()[1] = std::nan("");
    CHECK(!x.all_finite());
}

TEST_CASE("tape backward on trivial graphs") {
    // y = x: gradient of sum is ones
    Tape<double> tape;
    auto x = tape.leaf(from_vector<double>({3}, {1, 2, 3}));
    Tensor<double> y = x;  // identity
    Tensor<double> loss({1});
    loss.data()[0] = x.data()[0] + x.data()[1] + x.data()[2];
    tape.record({x.id()}, loss, [&](const Tensor<double>& g) {
        Tensor<double> gx({3});
        for (int i = 0; i < 3; ++i) gx.data()[i] = g.data()[0];
        return std::vector<Tensor<double>>{gx};
    });
    auto grads = tape.backward(loss);
    const auto& gx = grads.get(x.id());
    for (int i = 0; i < 3; ++i) CHECK(gx.data()[i] == 1.0);
}

TEST_CASE("tape backward accumulates over fan-out") {
    // loss = sum(x) computed through two identical branches added together
    Tape<double> tape;
    auto x = tape.leaf(from_vector<double>({2}, {1.0, 2.0}));
    // two nodes both consuming x
    Tensor<double> l({1});
    l.data()[0] = 2 * (x.data()[0] + x.data()[1]);
    tape.record({x.id(), x.id()}, l, [&](const Tensor<double>& g) {
        Tensor<double> ga({2}), gb({2});
        for (int i = 0; i < 2; ++i) ga.data()[i] = gb.data()[i] = g.data()[0];
        return std::vector<Tensor<double>>{ga, gb};
    });
    auto grads = tape.backward(l);
    const auto& gx = grads.get(x.id());
    CHECK(gx.data()[0] == 2.0);
    CHECK(gx.data()[1] == 2.0);
}

TEST_CASE("backward rejects non-scalar and off-tape losses") {
    Tape<double> tape;
    auto x = tape.leaf(from_vector<double>({2}, {1.0, 2.0}));
    CHECK_THROWS(tape.backward(x));  // non-scalar
    Tensor<double> loose = full<double>({1}, 1.0);
    CHECK_THROWS(tape.backward(loose));  // never recorded
}

TEST_CASE("finite_diff_check self test: quadratic") {
    // f(x) = sum(x^2) has gradient 2x; a correct op must score tiny
    ScalarFn<double> fn = [](Tape<double>* tp, const Tensor<double>& x) {
        Tensor<double> loss({1});
        double acc = 0;
        for (int64_t i = 0; i < x.size(); ++i) acc += x.data()[i] * x.data()[i];
        loss.data()[0] = acc;
        if (tp)
            tp->record({x.id()}, loss, [x](const Tensor<double>& g) {
                Tensor<double> gx(x.shape());
                for (int64_t i = 0; i < x.size(); ++i) gx.data()[i] = 2 * x.data()[i] * g.data()[0];
                return std::vector<Tensor<double>>{gx};
            });
        return loss;
    };
    Rng r(11);
    CHECK(finite_diff_check<double>(fn, randn<double>({5}, r)) < 1e-8);
}

TEST_CASE("finite_diff_check self test: wrong gradient is caught") {
    ScalarFn<double> bad = [](Tape<double>* tp, const Tensor<double>& x) {
        Tensor<double> loss({1});
        double acc = 0;
        for (int64_t i = 0; i < x.size(); ++i) acc += x.data()[i] * x.data()[i];
        loss.data()[0] = acc;
        if (tp)
            tp->record({x.id()}, loss, [x](const Tensor<double>& g) {
                Tensor<double> gx(x.shape());
                for (int64_t i = 0; i < x.size(); ++i) gx.data()[i] = 3 * x.data()[i] * g.data()[0];
                return std::vector<Tensor<double>>{gx};
            });
        return loss;
    };
    Rng r(13);
    CHECK(finite_diff_check<double>(bad, randn<double>({5}, r)) > 0.1);
}

TEST_CASE("max_abs_diff and same_values") {
    auto a = from_vector<double>({2}, {1, 2});
    auto b = from_vector<double>({2}, {1, 2.5});
    CHECK(max_abs_diff(a, b) == 0.5);
    CHECK(!same_values(a, b));
    CHECK(same_values(a, a.clone()));
}
