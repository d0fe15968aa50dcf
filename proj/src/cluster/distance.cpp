#include "frameforge/distance.hpp"

#include <algorithm>
#include <cmath>

#include "frameforge/kernels.hpp"

namespace frameforge {

double DistanceMatrix::max() const noexcept {
    return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

DistanceMatrix squared_euclidean_distances(const MatrixD& rows) {
    const auto& k = kernels::active();
    const std::size_t n = rows.rows();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d.set(i, j, k.squared_distance(rows.row(i).data(), rows.row(j).data(), rows.cols()));
        }
    }
    return d;
}

DistanceMatrix euclidean_distances(const MatrixD& rows) {
    const auto& k = kernels::active();
    const std::size_t n = rows.rows();
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d.set(i, j,
                  std::sqrt(k.squared_distance(rows.row(i).data(), rows.row(j).data(), rows.cols())));
        }
    }
    return d;
}

} // namespace frameforge
