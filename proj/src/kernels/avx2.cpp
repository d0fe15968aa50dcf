#include <immintrin.h>

#include "frameforge/kernels.hpp"

namespace frameforge::kernels::detail {

namespace {

// Four double lanes; the reduction therefore sums in a different order
// than the scalar loop.
double squared_distance(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= n; k += 8) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
    }
    for (; k + 4 <= n; k += 4) {
        const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    const __m128d lo = _mm256_castpd256_pd128(acc0);
    const __m128d hi = _mm256_extractf128_pd(acc0, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
    for (; k < n; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return sum;
}

void mix(const float* word, const float* mask, double alpha, double* out, std::size_t n) {
    const double keep = 1.0 - alpha;
    const __m256d vkeep = _mm256_set1_pd(keep);
    const __m256d valpha = _mm256_set1_pd(alpha);
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        const __m256d w = _mm256_cvtps_pd(_mm_loadu_ps(word + k));
        const __m256d m = _mm256_cvtps_pd(_mm_loadu_ps(mask + k));
        _mm256_storeu_pd(out + k, _mm256_add_pd(_mm256_mul_pd(vkeep, w), _mm256_mul_pd(valpha, m)));
    }
    for (; k < n; ++k) {
        out[k] = keep * static_cast<double>(word[k]) + alpha * static_cast<double>(mask[k]);
    }
}

void accumulate(double* acc, const double* x, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(acc + k, _mm256_add_pd(_mm256_loadu_pd(acc + k), _mm256_loadu_pd(x + k)));
    }
    for (; k < n; ++k) {
        acc[k] += x[k];
    }
}

void widen(const float* in, double* out, std::size_t n) {
    std::size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        _mm256_storeu_pd(out + k, _mm256_cvtps_pd(_mm_loadu_ps(in + k)));
    }
    for (; k < n; ++k) {
        out[k] = static_cast<double>(in[k]);
    }
}

constexpr KernelTable kAvx2{"avx2", squared_distance, mix, accumulate, widen};

} // namespace

const KernelTable& avx2_table() { return kAvx2; }

} // namespace frameforge::kernels::detail
