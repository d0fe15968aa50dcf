#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "frameforge/linkage.hpp"
#include "frameforge/matrix.hpp"

namespace frameforge {

struct XMeansOptions {
    std::size_t k_min = 1;
    std::size_t k_max = 0;  // 0: number of rows
    std::uint64_t seed = 0;
    std::size_t max_iterations = 100;
    double tolerance = 1e-6;  // relative centroid movement
};

/// X-means: k-means++ seeded k-means from `k_min` centres, then repeated
/// attempts to split every cluster with a local 2-means, keeping a split
/// when the spherical-Gaussian BIC of the two children beats the parent's.
/// Rows are visited in `item_keys` order so the result does not depend on
/// input order.
Partition xmeans_cluster(const MatrixD& rows, const XMeansOptions& options,
                         std::span<const std::size_t> item_keys = {});

/// BIC of a hard clustering under identical spherical Gaussians with the
/// pooled maximum-likelihood variance. Higher is better; -inf when the
/// variance is undefined (no more points than clusters).
double spherical_bic(const MatrixD& rows, std::span<const std::size_t> labels,
                     const MatrixD& centers);

} // namespace frameforge
