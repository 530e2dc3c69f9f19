// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_TENSOR_HPP
#define TC_TENSOR_HPP

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "tc/common.hpp"
#include "tc/rng.hpp"

namespace tc {

using Shape = std::vector<int64_t>;

inline int64_t shape_size(const Shape& shape) {
    int64_t n = 1;
    for (int64_t d : shape) n *= d;
    return n;
}

inline std::string shape_str(const Shape& shape) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
    os << "]";
    return os.str();
}

inline void check_shape_valid(const Shape& shape) {
    if (shape.empty()) throw ShapeError("invalid shape: empty extent list");
    for (int64_t d : shape)
        if (d < 1) throw ShapeError("invalid shape: non-positive extent in " + shape_str(shape));
}

// Row-major strides.
inline Shape strides_of(const Shape& shape) {
    Shape s(shape.size());
    int64_t acc = 1;
    for (size_t i = shape.size(); i-- > 0;) {
        s[i] = acc;
        acc *= shape[i];
    }
    return s;
}

// Dense N-d value tensor, row-major. Copies share storage; tensors are
// treated as immutable once handed to an op (the optimizer replaces whole
// tensors rather than writing through aliases).
template <class S>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape) : shape_(std::move(shape)) {
        check_shape_valid(shape_);
        data_ = std::make_shared<std::vector<S>>(shape_size(shape_), S(0));
    }

    Tensor(Shape shape, std::vector<S> data) : shape_(std::move(shape)) {
        check_shape_valid(shape_);
        if (static_cast<int64_t>(data.size()) != shape_size(shape_))
            throw ShapeError("data length " + std::to_string(data.size()) +
                             " does not match shape " + shape_str(shape_));
        data_ = std::make_shared<std::vector<S>>(std::move(data));
    }

    bool defined() const { return static_cast<bool>(data_); }
    const Shape& shape() const { return shape_; }
    int64_t rank() const { return static_cast<int64_t>(shape_.size()); }
    int64_t dim(int64_t i) const { return shape_[static_cast<size_t>(i)]; }
    int64_t size() const { return defined() ? static_cast<int64_t>(data_->size()) : 0; }
    bool is_scalar() const { return size() == 1; }

    S* data() { return data_->data(); }
    const S* data() const { return data_->data(); }
    S scalar() const {
        if (!is_scalar()) throw ShapeError("scalar() on tensor of shape " + shape_str(shape_));
        return (*data_)[0];
    }
    S at(int64_t flat) const { return (*data_)[static_cast<size_t>(flat)]; }

    // Tape node id; -1 when detached.
    int64_t id() const { return id_; }
    void set_id(int64_t id) { id_ = id; }
    Tensor detached() const {
        Tensor t = *this;
        t.id_ = -1;
        return t;
    }

    // Same storage, new shape (row-major reinterpretation).
    Tensor reshaped(Shape shape) const {
        check_shape_valid(shape);
        if (shape_size(shape) != size())
            throw ShapeError("reshape " + shape_str(shape_) + " -> " + shape_str(shape) +
                             ": element count mismatch");
        Tensor t = *this;
        t.shape_ = std::move(shape);
        t.id_ = -1;
        return t;
    }

    Tensor clone() const {
        Tensor t;
        t.shape_ = shape_;
        t.data_ = std::make_shared<std::vector<S>>(*data_);
        return t;
    }

    bool all_finite() const {
        for (S v : *data_)
            if (!std::isfinite(static_cast<double>(v))) return false;
        return true;
    }

private:
    Shape shape_;
    std::shared_ptr<std::vector<S>> data_;
    int64_t id_ = -1;
};

template <class S>
Tensor<S> zeros(const Shape& shape) {
    return Tensor<S>(shape);
}

template <class S>
Tensor<S> full(const Shape& shape, S value) {
    Tensor<S> t(shape);
    std::fill(t.data(), t.data() + t.size(), value);
    return t;
}

template <class S>
Tensor<S> randn(const Shape& shape, Rng& rng, double stddev = 1.0) {
    Tensor<S> t(shape);
    S* p = t.data();
    const int64_t n = t.size();
    for (int64_t i = 0; i < n; ++i) p[i] = static_cast<S>(stddev * rng.normal());
    return t;
}

template <class S>
Tensor<S> from_vector(const Shape& shape, std::vector<S> values) {
    return Tensor<S>(shape, std::move(values));
}

template <class S>
bool same_values(const Tensor<S>& a, const Tensor<S>& b) {
    if (a.shape() != b.shape()) return false;
    for (int64_t i = 0; i < a.size(); ++i)
        if (a.data()[i] != b.data()[i]) return false;
    return true;
}

template <class S>
double max_abs_diff(const Tensor<S>& a, const Tensor<S>& b) {
    double m = 0.0;
    for (int64_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i])));
    return m;
}

}  // namespace tc

#endif  // TC_TENSOR_HPP
