// Copyright 2026 The tckit Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TC_COMMON_HPP
#define TC_COMMON_HPP

#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tc {

// Base error. Subclasses map onto CLI exit codes:
//   ConfigError -> 1, FormatError -> 2, NumericError -> 3.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct FormatError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

// Worker cap: TC_THREADS env var, default machine parallelism.
inline int max_threads() {
    static int cached = [] {
        if (const char* env = std::getenv("TC_THREADS")) {
            int n = std::atoi(env);
            if (n >= 1) return n;
        }
#ifdef _OPENMP
        return omp_get_max_threads();
#else
        return 1;
#endif
    }();
    return cached;
}

inline bool use_parallel_kernels() { return max_threads() > 1; }

// NaN/Inf output checks are on in debug builds, or when TC_DEBUG_CHECKS=1.
inline bool debug_checks() {
    static bool cached = [] {
        if (const char* env = std::getenv("TC_DEBUG_CHECKS")) return std::atoi(env) != 0;
#ifdef NDEBUG
        return false;
#else
        return true;
#endif
    }();
    return cached;
}

}  // namespace tc

#endif  // TC_COMMON_HPP
