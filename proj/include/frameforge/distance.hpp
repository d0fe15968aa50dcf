#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "frameforge/matrix.hpp"

namespace frameforge {

/// Symmetric distance matrix with zero diagonal, stored as the strict upper
/// triangle.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t n) : n_(n), values_(n < 2 ? 0 : n * (n - 1) / 2) {}

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const noexcept {
        return i == j ? 0.0 : values_[index(i, j)];
    }
    void set(std::size_t i, std::size_t j, double value) noexcept {
        assert(i != j);
        values_[index(i, j)] = value;
    }

    /// Largest entry; 0 for fewer than two items.
    double max() const noexcept;

private:
    std::size_t index(std::size_t i, std::size_t j) const noexcept {
        if (i > j) {
            std::swap(i, j);
        }
        return i * (2 * n_ - i - 1) / 2 + (j - i - 1);
    }

    std::size_t n_ = 0;
    std::vector<double> values_;
};

/// Pairwise Euclidean distances between the rows of `rows`.
DistanceMatrix euclidean_distances(const MatrixD& rows);

/// Pairwise squared Euclidean distances.
DistanceMatrix squared_euclidean_distances(const MatrixD& rows);

} // namespace frameforge
