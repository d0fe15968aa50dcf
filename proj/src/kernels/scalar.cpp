#include "frameforge/kernels.hpp"

namespace frameforge::kernels {

namespace {

double squared_distance(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double diff = a[k] - b[k];
        sum += diff * diff;
    }
    return sum;
}

void mix(const float* word, const float* mask, double alpha, double* out, std::size_t n) {
    const double keep = 1.0 - alpha;
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = keep * static_cast<double>(word[k]) + alpha * static_cast<double>(mask[k]);
    }
}

void accumulate(double* acc, const double* x, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        acc[k] += x[k];
    }
}

void widen(const float* in, double* out, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = static_cast<double>(in[k]);
    }
}

constexpr KernelTable kScalar{"scalar", squared_distance, mix, accumulate, widen};

} // namespace

const KernelTable& scalar() { return kScalar; }

} // namespace frameforge::kernels
