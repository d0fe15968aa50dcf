#pragma once

#include <cstddef>
#include <string_view>

namespace frameforge::kernels {

// Inner-loop kernels behind the distance, mixing and centroid code. Each
// variant must agree with the scalar reference: bit-exact for elementwise
// kernels, up to summation order for reductions.
struct KernelTable {
    std::string_view name;
    /// sum_k (a[k] - b[k])^2
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    /// out[k] = (1 - alpha) * word[k] + alpha * mask[k]
    void (*mix)(const float* word, const float* mask, double alpha, double* out, std::size_t n);
    /// acc[k] += x[k]
    void (*accumulate)(double* acc, const double* x, std::size_t n);
    /// out[k] = double(in[k])
    void (*widen)(const float* in, double* out, std::size_t n);
};

const KernelTable& scalar();

/// AVX2 variant, or nullptr when it was not built or the CPU lacks AVX2.
const KernelTable* avx2();

/// The variant selected for this process. FRAMEFORGE_KERNELS=scalar|avx2
/// forces a choice; otherwise the widest supported variant wins.
const KernelTable& active();

} // namespace frameforge::kernels
