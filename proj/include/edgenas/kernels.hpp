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

#pragma once

// Dense float64 inner loops used by the autodiff engine.
//
// Every kernel exists as a portable scalar reference and, on x86-64 builds,
// as an AVX2/FMA variant. The variant is chosen once at startup from CPUID
// (override with EDGENAS_KERNELS=scalar|avx2) and may be switched at runtime
// for equivalence testing. All matrices are row-major and densely packed.
//
// Every kernel computes each output element from the same operands in the
// same order regardless of which row it sits in, so results are independent
// of row position within a matrix. Node permutation and graph batching tests
// depend on this.

#include <cstddef>
#include <string_view>

namespace edgenas::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
    /// c[m x n] += a[m x k] * b[k x n]
    void (*gemm_nn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n);
    /// c[m x n] += a[m x k] * b[n x k]^T
    void (*gemm_nt)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n);
    /// c[m x n] += a[k x m]^T * b[k x n]
    void (*gemm_tn)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
                    std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// z = x * y (elementwise); z may alias x or y
    void (*hadamard)(const double* x, const double* y, double* z, std::size_t n);
    /// z += x * y (elementwise)
    void (*hadamard_acc)(const double* x, const double* y, double* z, std::size_t n);
    /// y = max(y, x) elementwise
    void (*vmax)(const double* x, double* y, std::size_t n);
};

namespace scalar {
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void hadamard_acc(const double* x, const double* y, double* z, std::size_t n);
void vmax(const double* x, double* y, std::size_t n);
}  // namespace scalar

#if defined(EDGENAS_HAVE_AVX2)
namespace avx2 {
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void hadamard_acc(const double* x, const double* y, double* z, std::size_t n);
void vmax(const double* x, double* y, std::size_t n);
}  // namespace avx2
#endif

/// True when the variant was compiled in and the running CPU can execute it.
bool supported(Backend backend);

/// Kernel table of a specific variant. Throws edgenas::Error if unsupported.
const KernelTable& table(Backend backend);

/// Currently selected variant (process-wide).
Backend active_backend();
const KernelTable& active();

/// Select a variant for subsequent calls. Throws edgenas::Error if unsupported.
void set_backend(Backend backend);

std::string_view name(Backend backend);

/// RAII override of the active backend, restoring the previous one on exit.
class ScopedBackend {
public:
    explicit ScopedBackend(Backend backend);
    ~ScopedBackend();
    ScopedBackend(const ScopedBackend&) = delete;
    ScopedBackend& operator=(const ScopedBackend&) = delete;

private:
    Backend previous_;
};

}  // namespace edgenas::kernels
