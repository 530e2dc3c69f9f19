// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_TAPE_HPP
#define TC_TAPE_HPP

#include <functional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tc/tensor.hpp"

namespace tc {

template <class S>
class GradStore {
public:
    void set(int64_t id, Tensor<S> g) { grads_[id] = std::move(g); }

    void accumulate(int64_t id, const Tensor<S>& g) {
        auto it = grads_.find(id);
        if (it == grads_.end()) {
            grads_[id] = g.clone();
            return;
        }
        Tensor<S>& acc = it->second;
        if (acc.shape() != g.shape())
            throw ShapeError("gradient shape mismatch: " + shape_str(acc.shape()) + " vs " +
                             shape_str(g.shape()));
        S* a = acc.data();
        const S* b = g.data();
        for (int64_t i = 0; i < acc.size(); ++i) a[i] += b[i];
    }

    bool has(int64_t id) const { return grads_.count(id) != 0; }

    const Tensor<S>& get(const Tensor<S>& t) const { return get(t.id()); }

    const Tensor<S>& get(int64_t id) const {
        auto it = grads_.find(id);
        if (it == grads_.end()) throw Error("no gradient recorded for node " + std::to_string(id));
        return it->second;
    }

private:
    std::unordered_map<int64_t, Tensor<S>> grads_;
};

// Recorded computation graph for reverse-mode differentiation. Nodes are
// appended in execution order, which is a topological order by construction.
// One tape per worker; never shared across threads.
template <class S>
class Tape {
public:
    using GradFn = std::function<std::vector<Tensor<S>>(const Tensor<S>& grad_out)>;

    // Registers a leaf (parameter or input) so gradients flow to it.
    Tensor<S> leaf(Tensor<S> t) {
        t.set_id(next_id_++);
        shapes_[t.id()] = t.shape();
        return t;
    }

    // Records one op. `in_ids` are ids of the differentiable inputs (id < 0
    // entries are constants and get no gradient). `grad_fn` maps the output
    // gradient to per-input gradients, aligned with `in_ids`.
    void record(std::vector<int64_t> in_ids, Tensor<S>& out, GradFn grad_fn) {
        out.set_id(next_id_++);
        shapes_[out.id()] = out.shape();
        nodes_.push_back(Node{std::move(in_ids), out.id(), std::move(grad_fn)});
    }

    bool knows(int64_t id) const { return shapes_.count(id) != 0; }
    size_t num_nodes() const { return nodes_.size(); }

    // Reverse sweep from a scalar loss recorded on this tape.
    GradStore<S> backward(const Tensor<S>& loss) const {
        if (!loss.is_scalar()) throw Error("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
        if (loss.id() < 0 || !knows(loss.id()))
            throw Error("backward: loss tensor is not on this tape");
        GradStore<S> grads;
        grads.set(loss.id(), full<S>(loss.shape(), S(1)));
        for (size_t i = nodes_.size(); i-- > 0;) {
            const Node& node = nodes_[i];
            if (!grads.has(node.out_id)) continue;
            std::vector<Tensor<S>> gin = node.grad_fn(grads.get(node.out_id));
            if (gin.size() != node.in_ids.size())
                throw Error("backward rule returned wrong arity");
            for (size_t j = 0; j < gin.size(); ++j) {
                const int64_t id = node.in_ids[j];
                if (id < 0) continue;
                auto expect = shapes_.find(id);
                if (expect != shapes_.end() && gin[j].shape() != expect->second)
                    throw ShapeError("gradient shape " + shape_str(gin[j].shape()) +
                                     " does not match tensor shape " + shape_str(expect->second));
                grads.accumulate(id, gin[j]);
            }
        }
        return grads;
    }

private:
    struct Node {
        std::vector<int64_t> in_ids;
        int64_t out_id;
        GradFn grad_fn;
    };

    int64_t next_id_ = 0;
    std::vector<Node> nodes_;
    std::unordered_map<int64_t, Shape> shapes_;
};

}  // namespace tc

#endif  // TC_TAPE_HPP
