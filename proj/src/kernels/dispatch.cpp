// Copyright 2026 The edgenas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <atomic>
#include <cstdlib>
#include <string>

#include "edgenas/error.hpp"
#include "edgenas/kernels.hpp"

namespace edgenas::kernels {

namespace {

constexpr KernelTable kScalarTable{
    &scalar::gemm_nn,  &scalar::gemm_nt,      &scalar::gemm_tn, &scalar::axpy,
    &scalar::hadamard, &scalar::hadamard_acc, &scalar::vmax,
};

#if defined(EDGENAS_HAVE_AVX2)
constexpr KernelTable kAvx2Table{
    &avx2::gemm_nn,  &avx2::gemm_nt,      &avx2::gemm_tn, &avx2::axpy,
    &avx2::hadamard, &avx2::hadamard_acc, &avx2::vmax,
};
#endif

bool cpu_has_avx2() {
#if defined(EDGENAS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char* env = std::getenv("EDGENAS_KERNELS")) {
        const std::string value(env);
        if (value == "scalar") {
            return Backend::Scalar;
        }
        if (value == "avx2" && cpu_has_avx2()) {
            return Backend::Avx2;
        }
    }
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& selected() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

bool supported(Backend backend) {
    switch (backend) {
        case Backend::Scalar:
            return true;
        case Backend::Avx2:
            return cpu_has_avx2();
    }
    return false;
}

const KernelTable& table(Backend backend) {
    if (!supported(backend)) {
        throw Error("kernel backend '" + std::string(name(backend)) + "' is not available");
    }
#if defined(EDGENAS_HAVE_AVX2)
    if (backend == Backend::Avx2) {
        return kAvx2Table;
    }
#endif
    return kScalarTable;
}

Backend active_backend() { return selected().load(std::memory_order_relaxed); }

const KernelTable& active() {
#if defined(EDGENAS_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) {
        return kAvx2Table;
    }
#endif
    return kScalarTable;
}

void set_backend(Backend backend) {
    if (!supported(backend)) {
        throw Error("kernel backend '" + std::string(name(backend)) + "' is not available");
    }
    selected().store(backend, std::memory_order_relaxed);
}

std::string_view name(Backend backend) {
    switch (backend) {
        case Backend::Scalar:
            return "scalar";
        case Backend::Avx2:
            return "avx2";
    }
    return "unknown";
}

ScopedBackend::ScopedBackend(Backend backend) : previous_(active_backend()) {
    set_backend(backend);
}

ScopedBackend::~ScopedBackend() { selected().store(previous_, std::memory_order_relaxed); }

}  // namespace edgenas::kernels
