#include "frameforge/xmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "frameforge/error.hpp"
#include "frameforge/kernels.hpp"
#include "frameforge/rng.hpp"

namespace frameforge {

namespace {

const kernels::KernelTable& K() { return kernels::active(); }

double sqdist(std::span<const double> a, std::span<const double> b) {
    return K().squared_distance(a.data(), b.data(), a.size());
}

MatrixD kmeanspp(const MatrixD& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    MatrixD centers(k, points.cols());
    std::vector<double> weight(n, std::numeric_limits<double>::infinity());
    std::vector<char> chosen(n, 0);

    std::size_t pick = rng.below(n);
    for (std::size_t c = 0; c < k; ++c) {
        if (c > 0) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                total += chosen[i] ? 0.0 : weight[i];
            }
            pick = n;
            if (total > 0.0) {
                const double target = rng.uniform() * total;
                double running = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (chosen[i] || weight[i] == 0.0) {
                        continue;
                    }
                    running += weight[i];
                    pick = i;
                    if (running > target) {
                        break;
                    }
                }
            }
            if (pick == n) {
                // Every remaining point coincides with a centre.
                pick = static_cast<std::size_t>(std::find(chosen.begin(), chosen.end(), 0) -
                                                chosen.begin());
            }
        }
        chosen[pick] = 1;
        std::copy(points.row(pick).begin(), points.row(pick).end(), centers.row(c).begin());
        for (std::size_t i = 0; i < n; ++i) {
            weight[i] = std::min(weight[i], sqdist(points.row(i), centers.row(c)));
        }
    }
    return centers;
}

std::size_t nearest(const MatrixD& centers, std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        const double d = sqdist(x, centers.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

void recompute_centers(const MatrixD& points, std::span<const std::size_t> labels,
                       MatrixD& centers) {
    std::vector<std::size_t> count(centers.rows(), 0);
    MatrixD sums(centers.rows(), centers.cols());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        K().accumulate(sums.row(labels[i]).data(), points.row(i).data(), points.cols());
        ++count[labels[i]];
    }
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        if (count[c] == 0) {
            continue;
        }
        const double inv = 1.0 / static_cast<double>(count[c]);
        for (std::size_t j = 0; j < centers.cols(); ++j) {
            centers(c, j) = sums(c, j) * inv;
        }
    }
}

// Moves the worst-fitting point of a multi-member cluster into each empty
// cluster, so every centre keeps at least one point.
void fill_empty(const MatrixD& points, std::vector<std::size_t>& labels, MatrixD& centers) {
    std::vector<std::size_t> count(centers.rows(), 0);
    for (auto l : labels) {
        ++count[l];
    }
    for (std::size_t c = 0; c < centers.rows(); ++c) {
        if (count[c] != 0) {
            continue;
        }
        std::size_t worst = points.rows();
        double worst_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (count[labels[i]] < 2) {
                continue;
            }
            const double d = sqdist(points.row(i), centers.row(labels[i]));
            if (d > worst_d) {
                worst_d = d;
                worst = i;
            }
        }
        if (worst == points.rows()) {
            return;  // fewer points than centres; cannot happen for k <= n
        }
        --count[labels[worst]];
        labels[worst] = c;
        count[c] = 1;
        std::copy(points.row(worst).begin(), points.row(worst).end(), centers.row(c).begin());
    }
}

std::vector<std::size_t> lloyd(const MatrixD& points, MatrixD& centers,
                               const XMeansOptions& options) {
    std::vector<std::size_t> labels(points.rows(), 0);
    std::vector<std::size_t> previous;
    for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
        for (std::size_t i = 0; i < points.rows(); ++i) {
            labels[i] = nearest(centers, points.row(i));
        }
        fill_empty(points, labels, centers);
        if (labels == previous) {
            break;
        }
        const MatrixD old = centers;
        recompute_centers(points, labels, centers);

        double scale = 0.0, moved = 0.0;
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            double norm = 0.0;
            for (double v : old.row(c)) {
                norm += v * v;
            }
            scale = std::max(scale, std::sqrt(norm));
            moved = std::max(moved, std::sqrt(sqdist(old.row(c), centers.row(c))));
        }
        previous = labels;
        if (moved <= options.tolerance * std::max(scale, 1e-300)) {
            break;
        }
    }
    return labels;
}

MatrixD gather(const MatrixD& rows, std::span<const std::size_t> idx) {
    MatrixD out(idx.size(), rows.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::copy(rows.row(idx[i]).begin(), rows.row(idx[i]).end(), out.row(i).begin());
    }
    return out;
}

struct SplitCandidate {
    std::size_t cluster;
    double gain;
    MatrixD children;
};

} // namespace

double spherical_bic(const MatrixD& rows, std::span<const std::size_t> labels,
                     const MatrixD& centers) {
    const std::size_t R = rows.rows();
    const std::size_t k = centers.rows();
    if (R <= k) {
        return -std::numeric_limits<double>::infinity();
    }
    const double r = static_cast<double>(R);
    const double m = static_cast<double>(rows.cols());
    const double kk = static_cast<double>(k);

    std::vector<std::size_t> count(k, 0);
    double sse = 0.0;
    for (std::size_t i = 0; i < R; ++i) {
        sse += sqdist(rows.row(i), centers.row(labels[i]));
        ++count[labels[i]];
    }
    const double variance = std::max(sse / (r - kk), std::numeric_limits<double>::min());

    double loglik = -r * std::log(r) - 0.5 * r * std::log(2.0 * M_PI) -
                    0.5 * r * m * std::log(variance) - 0.5 * (r - kk);
    for (auto rn : count) {
        if (rn > 0) {
            loglik += static_cast<double>(rn) * std::log(static_cast<double>(rn));
        }
    }
    const double params = (kk - 1.0) + m * kk + 1.0;
    return loglik - 0.5 * params * std::log(r);
}

Partition xmeans_cluster(const MatrixD& rows, const XMeansOptions& options,
                         std::span<const std::size_t> item_keys) {
    const std::size_t n = rows.rows();
    const std::size_t k_max = options.k_max == 0 ? n : options.k_max;
    if (n == 0 || options.k_min < 1 || options.k_min > k_max || k_max > n) {
        throw InvalidArgument("xmeans: require 1 <= k_min <= k_max <= rows");
    }

    // Work in key order.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (!item_keys.empty()) {
        if (item_keys.size() != n) {
            throw InvalidArgument("item_keys must have one key per row");
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return item_keys[a] < item_keys[b]; });
    }
    const MatrixD points = gather(rows, order);

    Rng rng(options.seed);
    MatrixD centers = kmeanspp(points, options.k_min, rng);
    std::vector<std::size_t> labels = lloyd(points, centers, options);

    for (std::size_t round = 0; centers.rows() < k_max; ++round) {
        std::vector<std::vector<std::size_t>> members(centers.rows());
        for (std::size_t i = 0; i < n; ++i) {
            members[labels[i]].push_back(i);
        }

        std::vector<SplitCandidate> candidates;
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            if (members[c].size() < 2) {
                continue;
            }
            const MatrixD local = gather(points, members[c]);
            MatrixD parent(1, points.cols());
            std::copy(centers.row(c).begin(), centers.row(c).end(), parent.row(0).begin());
            const std::vector<std::size_t> parent_labels(local.rows(), 0);

            Rng local_rng(splitmix64(options.seed ^ splitmix64((round << 32) ^ c)));
            MatrixD children = kmeanspp(local, 2, local_rng);
            const auto child_labels = lloyd(local, children, options);

            const double gain = spherical_bic(local, child_labels, children) -
                                spherical_bic(local, parent_labels, parent);
            if (gain > 0.0) {
                candidates.push_back({c, gain, std::move(children)});
            }
        }
        if (candidates.empty()) {
            break;
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto& a, const auto& b) { return a.gain > b.gain; });
        candidates.resize(std::min(candidates.size(), k_max - centers.rows()));

        std::vector<const MatrixD*> split_of(centers.rows(), nullptr);
        for (const auto& cand : candidates) {
            split_of[cand.cluster] = &cand.children;
        }
        MatrixD next(centers.rows() + candidates.size(), centers.cols());
        std::size_t out = 0;
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            if (split_of[c]) {
                for (std::size_t h = 0; h < 2; ++h, ++out) {
                    std::copy(split_of[c]->row(h).begin(), split_of[c]->row(h).end(),
                              next.row(out).begin());
                }
            } else {
                std::copy(centers.row(c).begin(), centers.row(c).end(), next.row(out++).begin());
            }
        }
        centers = std::move(next);
        labels = lloyd(points, centers, options);
    }

    std::vector<std::size_t> original(n);
    for (std::size_t i = 0; i < n; ++i) {
        original[order[i]] = labels[i];
    }
    return canonical_partition(original, item_keys);
}

} // namespace frameforge
