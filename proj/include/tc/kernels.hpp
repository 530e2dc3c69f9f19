// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Compute kernels behind the differentiable ops. Every kernel exists twice:
// a plain serial reference in kernels::serial and an OpenMP version in
// kernels::par. Both compute each output element with the identical
// summation order, so results are bitwise equal regardless of thread count.
// Feature tensors are flattened to [P, T, Q, C]: P batch, T time, Q = H*W
// spatial positions, C channels.

#ifndef TC_KERNELS_HPP
#define TC_KERNELS_HPP

#include <algorithm>
#include <cstdint>
#include <limits>

#include "tc/common.hpp"

namespace tc::kernels {

struct ConvDims {
    int64_t p;        // batch
    int64_t t_in;     // input time
    int64_t t_out;    // output time
    int64_t q;        // spatial positions
    int64_t c;        // channels
    int64_t k;        // kernel size
    int64_t d;        // dilation
    int64_t t_base;   // offset of kernel tap 0: -(k-1)/2*d for same, 0 for valid
};

#define TC_DW_FWD_BODY                                                                 \
    for (int64_t t = 0; t < dims.t_out; ++t)                                           \
        for (int64_t q = 0; q < dims.q; ++q)                                           \
            for (int64_t c = 0; c < dims.c; ++c) {                                     \
                S acc = bias[c];                                                       \
                for (int64_t j = 0; j < dims.k; ++j) {                                 \
                    const int64_t ti = t + dims.t_base + j * dims.d;                   \
                    if (ti < 0 || ti >= dims.t_in) continue;                           \
                    acc += w[j * dims.c + c] * x[((p * dims.t_in + ti) * dims.q + q) * dims.c + c]; \
                }                                                                      \
                y[((p * dims.t_out + t) * dims.q + q) * dims.c + c] = acc;             \
            }

template <class S>
void depthwise_conv_fwd_serial(const S* x, const S* w, const S* bias, S* y, const ConvDims& dims) {
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_DW_FWD_BODY
    }
}

template <class S>
void depthwise_conv_fwd_par(const S* x, const S* w, const S* bias, S* y, const ConvDims& dims) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_DW_FWD_BODY
    }
}

#undef TC_DW_FWD_BODY

// Gradient w.r.t. input: gather form (each input element scans the output
// positions that read it), so it is race-free and order-deterministic.
#define TC_DW_BWD_X_BODY                                                               \
    for (int64_t t = 0; t < dims.t_in; ++t)                                            \
        for (int64_t q = 0; q < dims.q; ++q)                                           \
            for (int64_t c = 0; c < dims.c; ++c) {                                     \
                S acc = S(0);                                                          \
                for (int64_t j = 0; j < dims.k; ++j) {                                 \
                    const int64_t to = t - dims.t_base - j * dims.d;                   \
                    if (to < 0 || to >= dims.t_out) continue;                          \
                    acc += w[j * dims.c + c] * gy[((p * dims.t_out + to) * dims.q + q) * dims.c + c]; \
                }                                                                      \
                gx[((p * dims.t_in + t) * dims.q + q) * dims.c + c] = acc;             \
            }

template <class S>
void depthwise_conv_bwd_x_serial(const S* gy, const S* w, S* gx, const ConvDims& dims) {
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_DW_BWD_X_BODY
    }
}

template <class S>
void depthwise_conv_bwd_x_par(const S* gy, const S* w, S* gx, const ConvDims& dims) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_DW_BWD_X_BODY
    }
}

#undef TC_DW_BWD_X_BODY

// Gradients w.r.t. kernel and bias. Parallel over (j, c) pairs; each pair is
// accumulated serially in fixed index order.
#define TC_DW_BWD_W_BODY                                                               \
    {                                                                                  \
        const int64_t j = jc / dims.c;                                                 \
        const int64_t c = jc % dims.c;                                                 \
        S acc = S(0);                                                                  \
        for (int64_t p = 0; p < dims.p; ++p)                                           \
            for (int64_t t = 0; t < dims.t_out; ++t) {                                 \
                const int64_t ti = t + dims.t_base + j * dims.d;                       \
                if (ti < 0 || ti >= dims.t_in) continue;                               \
                for (int64_t q = 0; q < dims.q; ++q)                                   \
                    acc += gy[((p * dims.t_out + t) * dims.q + q) * dims.c + c] *      \
                           x[((p * dims.t_in + ti) * dims.q + q) * dims.c + c];        \
            }                                                                          \
        gw[j * dims.c + c] = acc;                                                      \
    }

template <class S>
void depthwise_conv_bwd_w_serial(const S* gy, const S* x, S* gw, const ConvDims& dims) {
    for (int64_t jc = 0; jc < dims.k * dims.c; ++jc) TC_DW_BWD_W_BODY
}

template <class S>
void depthwise_conv_bwd_w_par(const S* gy, const S* x, S* gw, const ConvDims& dims) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t jc = 0; jc < dims.k * dims.c; ++jc) TC_DW_BWD_W_BODY
}

#undef TC_DW_BWD_W_BODY

template <class S>
void channel_sum(const S* g, int64_t rows, int64_t c, S* out) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t ci = 0; ci < c; ++ci) {
        S acc = S(0);
        for (int64_t r = 0; r < rows; ++r) acc += g[r * c + ci];
        out[ci] = acc;
    }
}

// y[rows, co] = x[rows, ci] * w[ci, co] + b[co]
#define TC_MATMUL_BODY                                                                 \
    {                                                                                  \
        S* yr = y + r * co;                                                            \
        for (int64_t oc = 0; oc < co; ++oc) yr[oc] = bias ? bias[oc] : S(0);           \
        const S* xr = x + r * ci;                                                      \
        for (int64_t ic = 0; ic < ci; ++ic) {                                          \
            const S xv = xr[ic];                                                       \
            const S* wr = w + ic * co;                                                 \
            for (int64_t oc = 0; oc < co; ++oc) yr[oc] += xv * wr[oc];                 \
        }                                                                              \
    }

template <class S>
void matmul_bias_serial(const S* x, const S* w, const S* bias, S* y, int64_t rows, int64_t ci,
                        int64_t co) {
    for (int64_t r = 0; r < rows; ++r) TC_MATMUL_BODY
}

template <class S>
void matmul_bias_par(const S* x, const S* w, const S* bias, S* y, int64_t rows, int64_t ci,
                     int64_t co) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t r = 0; r < rows; ++r) TC_MATMUL_BODY
}

#undef TC_MATMUL_BODY

// gx[rows, ci] = gy[rows, co] * w^T
#define TC_MATMUL_BWD_X_BODY                                                           \
    {                                                                                  \
        const S* gr = gy + r * co;                                                     \
        S* gxr = gx + r * ci;                                                          \
        for (int64_t ic = 0; ic < ci; ++ic) {                                          \
            S acc = S(0);                                                              \
            const S* wr = w + ic * co;                                                 \
            for (int64_t oc = 0; oc < co; ++oc) acc += gr[oc] * wr[oc];                \
            gxr[ic] = acc;                                                             \
        }                                                                              \
    }

template <class S>
void matmul_bwd_x_serial(const S* gy, const S* w, S* gx, int64_t rows, int64_t ci, int64_t co) {
    for (int64_t r = 0; r < rows; ++r) TC_MATMUL_BWD_X_BODY
}

template <class S>
void matmul_bwd_x_par(const S* gy, const S* w, S* gx, int64_t rows, int64_t ci, int64_t co) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t r = 0; r < rows; ++r) TC_MATMUL_BWD_X_BODY
}

#undef TC_MATMUL_BWD_X_BODY

// gw[ci, co] = x^T * gy; parallel over ci rows, serial over data rows.
#define TC_MATMUL_BWD_W_BODY                                                           \
    {                                                                                  \
        S* gwr = gw + ic * co;                                                         \
        for (int64_t oc = 0; oc < co; ++oc) gwr[oc] = S(0);                            \
        for (int64_t r = 0; r < rows; ++r) {                                           \
            const S xv = x[r * ci + ic];                                               \
            const S* gr = gy + r * co;                                                 \
            for (int64_t oc = 0; oc < co; ++oc) gwr[oc] += xv * gr[oc];                \
        }                                                                              \
    }

template <class S>
void matmul_bwd_w_serial(const S* gy, const S* x, S* gw, int64_t rows, int64_t ci, int64_t co) {
    for (int64_t ic = 0; ic < ci; ++ic) TC_MATMUL_BWD_W_BODY
}

template <class S>
void matmul_bwd_w_par(const S* gy, const S* x, S* gw, int64_t rows, int64_t ci, int64_t co) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t ic = 0; ic < ci; ++ic) TC_MATMUL_BWD_W_BODY
}

#undef TC_MATMUL_BWD_W_BODY

struct PoolDims {
    int64_t p;
    int64_t t_in;
    int64_t t_out;
    int64_t q;
    int64_t c;
    int64_t k;
    int64_t s;
};

// Temporal max pooling. `same` behaviour is realised by clipping the window
// at the right edge (equivalent to -inf padding). Argmax stores the winning
// input timestep; ties go to the lowest index.
#define TC_MAXPOOL_FWD_BODY                                                            \
    for (int64_t t = 0; t < dims.t_out; ++t) {                                         \
        const int64_t lo = t * dims.s;                                                 \
        const int64_t hi = std::min(lo + dims.k, dims.t_in);                           \
        for (int64_t q = 0; q < dims.q; ++q)                                           \
            for (int64_t c = 0; c < dims.c; ++c) {                                     \
                S best = x[((p * dims.t_in + lo) * dims.q + q) * dims.c + c];          \
                int64_t best_t = lo;                                                   \
                for (int64_t ti = lo + 1; ti < hi; ++ti) {                             \
                    const S v = x[((p * dims.t_in + ti) * dims.q + q) * dims.c + c];   \
                    if (v > best) {                                                    \
                        best = v;                                                      \
                        best_t = ti;                                                   \
                    }                                                                  \
                }                                                                      \
                const int64_t oi = ((p * dims.t_out + t) * dims.q + q) * dims.c + c;   \
                y[oi] = best;                                                          \
                argmax[oi] = static_cast<int32_t>(best_t);                             \
            }                                                                          \
    }

template <class S>
void maxpool_fwd_serial(const S* x, S* y, int32_t* argmax, const PoolDims& dims) {
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_MAXPOOL_FWD_BODY
    }
}

template <class S>
void maxpool_fwd_par(const S* x, S* y, int32_t* argmax, const PoolDims& dims) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_MAXPOOL_FWD_BODY
    }
}

#undef TC_MAXPOOL_FWD_BODY

// Gather form: every input element sums the output windows whose argmax is
// itself. Overlapping windows (s < k) therefore never race.
#define TC_MAXPOOL_BWD_BODY                                                            \
    for (int64_t t = 0; t < dims.t_in; ++t) {                                          \
        const int64_t to_lo = std::max<int64_t>(0, (t - dims.k + dims.s) / dims.s);    \
        const int64_t to_hi = std::min(dims.t_out - 1, t / dims.s);                    \
        for (int64_t q = 0; q < dims.q; ++q)                                           \
            for (int64_t c = 0; c < dims.c; ++c) {                                     \
                S acc = S(0);                                                          \
                for (int64_t to = to_lo; to <= to_hi; ++to) {                          \
                    const int64_t oi = ((p * dims.t_out + to) * dims.q + q) * dims.c + c; \
                    if (argmax[oi] == t) acc += gy[oi];                                \
                }                                                                      \
                gx[((p * dims.t_in + t) * dims.q + q) * dims.c + c] = acc;             \
            }                                                                          \
    }

template <class S>
void maxpool_bwd_serial(const S* gy, const int32_t* argmax, S* gx, const PoolDims& dims) {
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_MAXPOOL_BWD_BODY
    }
}

template <class S>
void maxpool_bwd_par(const S* gy, const int32_t* argmax, S* gx, const PoolDims& dims) {
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int64_t p = 0; p < dims.p; ++p) {
        TC_MAXPOOL_BWD_BODY
    }
}

#undef TC_MAXPOOL_BWD_BODY

// Dispatchers: one switch point between the reference and OpenMP paths.

template <class S>
void depthwise_conv_fwd(const S* x, const S* w, const S* b, S* y, const ConvDims& d) {
    use_parallel_kernels() ? depthwise_conv_fwd_par(x, w, b, y, d)
                           : depthwise_conv_fwd_serial(x, w, b, y, d);
}
template <class S>
void depthwise_conv_bwd_x(const S* gy, const S* w, S* gx, const ConvDims& d) {
    use_parallel_kernels() ? depthwise_conv_bwd_x_par(gy, w, gx, d)
                           : depthwise_conv_bwd_x_serial(gy, w, gx, d);
}
template <class S>
void depthwise_conv_bwd_w(const S* gy, const S* x, S* gw, const ConvDims& d) {
    use_parallel_kernels() ? depthwise_conv_bwd_w_par(gy, x, gw, d)
                           : depthwise_conv_bwd_w_serial(gy, x, gw, d);
}
template <class S>
void matmul_bias(const S* x, const S* w, const S* b, S* y, int64_t rows, int64_t ci, int64_t co) {
    use_parallel_kernels() ? matmul_bias_par(x, w, b, y, rows, ci, co)
                           : matmul_bias_serial(x, w, b, y, rows, ci, co);
}
template <class S>
void matmul_bwd_x(const S* gy, const S* w, S* gx, int64_t rows, int64_t ci, int64_t co) {
    use_parallel_kernels() ? matmul_bwd_x_par(gy, w, gx, rows, ci, co)
                           : matmul_bwd_x_serial(gy, w, gx, rows, ci, co);
}
template <class S>
void matmul_bwd_w(const S* gy, const S* x, S* gw, int64_t rows, int64_t ci, int64_t co) {
    use_parallel_kernels() ? matmul_bwd_w_par(gy, x, gw, rows, ci, co)
                           : matmul_bwd_w_serial(gy, x, gw, rows, ci, co);
}
template <class S>
void maxpool_fwd(const S* x, S* y, int32_t* a, const PoolDims& d) {
    use_parallel_kernels() ? maxpool_fwd_par(x, y, a, d) : maxpool_fwd_serial(x, y, a, d);
}
template <class S>
void maxpool_bwd(const S* gy, const int32_t* a, S* gx, const PoolDims& d) {
    use_parallel_kernels() ? maxpool_bwd_par(gy, a, gx, d) : maxpool_bwd_serial(gy, a, gx, d);
}

}  // namespace tc::kernels

#endif  // TC_KERNELS_HPP
