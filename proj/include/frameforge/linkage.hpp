#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "frameforge/distance.hpp"
#include "frameforge/matrix.hpp"

namespace frameforge {

/// One agglomeration step. Node ids follow the usual dendrogram convention:
/// leaves are 0..n-1 and the cluster created by step s is n + s.
struct Merge {
    std::size_t first = 0;  // node with the smaller tie-break key
    std::size_t second = 0;
    double distance = 0.0;  // average linkage, or Ward's SSE increase
    std::size_t merged = 0;
    std::size_t size = 0;   // leaves under `merged`
};

struct Dendrogram {
    std::size_t leaf_count = 0;
    std::vector<Merge> merges;
};

/// Flat clustering of items 0..n-1. Labels are canonical: cluster 0 holds
/// the item with the smallest key, cluster 1 the smallest key among the
/// rest, and so on.
struct Partition {
    std::vector<std::size_t> labels;
    std::size_t cluster_count = 0;

    bool operator==(const Partition&) const = default;
};

struct ClusteringResult {
    Partition partition;
    Dendrogram dendrogram;
};

namespace stop {

/// Merge while the closest pair is at distance <= theta.
struct Threshold {
    double theta = 0.0;
};

/// Merge until exactly k clusters remain.
struct ClusterCount {
    std::size_t k = 1;
};

/// Merge down to a single cluster.
struct Full {};

struct MergeEvent {
    const Merge& merge;
    std::size_t first_size;
    std::size_t second_size;
    std::size_t clusters_remaining;
};

/// Consulted after every merge; returning true stops agglomeration with
/// that merge applied.
struct Callback {
    std::function<bool(const MergeEvent&)> should_stop;
};

} // namespace stop

using StopRule = std::variant<stop::Threshold, stop::ClusterCount, stop::Full, stop::Callback>;

enum class Linkage { group_average, ward };

/// Deterministic agglomerative clustering over a precomputed dissimilarity.
/// At every step the live pair with the smallest linkage value merges; ties
/// go to the pair whose (smaller, larger) cluster keys are lexicographically
/// smallest, where a cluster's key is the smallest item key it contains.
/// `item_keys` must be distinct; when empty, item positions are the keys.
///
/// Linkage updates use the Lance-Williams recurrences. For Ward the
/// dissimilarity is the SSE increase of merging, so the caller passes half
/// the squared Euclidean distances (see ward_cluster).
ClusteringResult agglomerate(DistanceMatrix dissimilarity, Linkage linkage, const StopRule& stop,
                             std::span<const std::size_t> item_keys = {});

/// Group-average (UPGMA) clustering on Euclidean distances.
ClusteringResult group_average_cluster(const DistanceMatrix& distances, const StopRule& stop,
                                       std::span<const std::size_t> item_keys = {});

/// Ward clustering of the rows of `rows`; each merge minimises the increase
/// in total within-cluster sum of squared deviations.
ClusteringResult ward_cluster(const MatrixD& rows, const StopRule& stop,
                              std::span<const std::size_t> item_keys = {});

/// Rank of every id in sorted order, for use as tie-break keys that do not
/// depend on input order.
std::vector<std::size_t> rank_keys(std::span<const std::string> ids);

/// Canonical relabelling of arbitrary labels (see Partition).
Partition canonical_partition(std::span<const std::size_t> labels,
                              std::span<const std::size_t> item_keys = {});

} // namespace frameforge
