#include "frameforge/linkage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "frameforge/error.hpp"

namespace frameforge {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

std::vector<std::size_t> resolve_keys(std::span<const std::size_t> item_keys, std::size_t n) {
    std::vector<std::size_t> keys(n);
    if (item_keys.empty()) {
        std::iota(keys.begin(), keys.end(), std::size_t{0});
        return keys;
    }
    if (item_keys.size() != n) {
        throw InvalidArgument("item_keys must have one key per item");
    }
    keys.assign(item_keys.begin(), item_keys.end());
    auto sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidArgument("item_keys must be distinct");
    }
    return keys;
}

void check_stop(const StopRule& stop, std::size_t n) {
    if (const auto* t = std::get_if<stop::Threshold>(&stop)) {
        if (std::isnan(t->theta) || t->theta < 0.0) {
            throw InvalidArgument("threshold must be a non-negative number");
        }
    } else if (const auto* c = std::get_if<stop::ClusterCount>(&stop)) {
        if (c->k < 1 || c->k > n) {
            throw InvalidArgument("cluster count must lie in [1, " + std::to_string(n) + "]");
        }
    } else if (const auto* cb = std::get_if<stop::Callback>(&stop)) {
        if (!cb->should_stop) {
            throw InvalidArgument("callback stop rule needs a predicate");
        }
    }
}

// Live-cluster state with a cached nearest neighbour per slot. A slot's
// cache is rebuilt only when its partner took part in a merge.
class Agglomerator {
public:
    Agglomerator(DistanceMatrix d, Linkage linkage, std::vector<std::size_t> keys)
        : d_(std::move(d)),
          linkage_(linkage),
          n_(d_.size()),
          key_(std::move(keys)),
          active_(n_, 1),
          size_(n_, 1),
          node_(n_),
          members_(n_),
          nn_(n_, kNone),
          nn_d_(n_, std::numeric_limits<double>::infinity()) {
        std::iota(node_.begin(), node_.end(), std::size_t{0});
        for (std::size_t i = 0; i < n_; ++i) {
            members_[i] = {i};
        }
        for (std::size_t i = 0; i < n_; ++i) {
            refresh(i);
        }
    }

    ClusteringResult run(const StopRule& stop) {
        Dendrogram dendro;
        dendro.leaf_count = n_;
        std::size_t live = n_;

        while (live > 1) {
            if (const auto* c = std::get_if<stop::ClusterCount>(&stop); c && live <= c->k) {
                break;
            }
            std::size_t best = kNone;
            for (std::size_t i = 0; i < n_; ++i) {
                if (active_[i] && nn_[i] != kNone &&
                    (best == kNone || less(nn_d_[i], i, nn_[i], nn_d_[best], best, nn_[best]))) {
                    best = i;
                }
            }
            const double dist = nn_d_[best];
            if (const auto* t = std::get_if<stop::Threshold>(&stop); t && !(dist <= t->theta)) {
                break;
            }

            std::size_t a = best;
            std::size_t b = nn_[best];
            if (key_[b] < key_[a]) {
                std::swap(a, b);
            }
            const std::size_t size_a = size_[a];
            const std::size_t size_b = size_[b];
            merge(a, b);
            --live;

            Merge m{node_[a], node_[b], dist, n_ + dendro.merges.size(), size_a + size_b};
            node_[a] = m.merged;
            dendro.merges.push_back(m);

            if (const auto* cb = std::get_if<stop::Callback>(&stop)) {
                if (cb->should_stop(stop::MergeEvent{dendro.merges.back(), size_a, size_b, live})) {
                    break;
                }
            }
        }
        return {partition(), std::move(dendro)};
    }

private:
    // Strict order on candidate pairs: linkage value, then cluster keys.
    bool less(double d1, std::size_t i1, std::size_t j1, double d2, std::size_t i2,
              std::size_t j2) const {
        if (d1 != d2) {
            return d1 < d2;
        }
        const auto lo1 = std::min(key_[i1], key_[j1]), hi1 = std::max(key_[i1], key_[j1]);
        const auto lo2 = std::min(key_[i2], key_[j2]), hi2 = std::max(key_[i2], key_[j2]);
        return lo1 != lo2 ? lo1 < lo2 : hi1 < hi2;
    }

    void refresh(std::size_t i) {
        nn_[i] = kNone;
        nn_d_[i] = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i || !active_[j]) {
                continue;
            }
            const double dij = d_(i, j);
            if (nn_[i] == kNone || less(dij, i, j, nn_d_[i], i, nn_[i])) {
                nn_[i] = j;
                nn_d_[i] = dij;
            }
        }
    }

    // Folds slot b into slot a; a keeps the smaller key.
    void merge(std::size_t a, std::size_t b) {
        const double dab = d_(a, b);
        const double na = static_cast<double>(size_[a]);
        const double nb = static_cast<double>(size_[b]);
        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a || k == b) {
                continue;
            }
            const double dka = d_(k, a);
            const double dkb = d_(k, b);
            double updated;
            if (linkage_ == Linkage::group_average) {
                updated = (na * dka + nb * dkb) / (na + nb);
            } else {
                const double nk = static_cast<double>(size_[k]);
                updated = ((nk + na) * dka + (nk + nb) * dkb - nk * dab) / (nk + na + nb);
                updated = std::max(updated, 0.0);
            }
            d_.set(k, a, updated);
        }

        active_[b] = 0;
        size_[a] += size_[b];
        members_[a].insert(members_[a].end(), members_[b].begin(), members_[b].end());
        members_[b].clear();

        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a) {
                continue;
            }
            if (nn_[k] == a || nn_[k] == b) {
                refresh(k);
            } else if (less(d_(k, a), k, a, nn_d_[k], k, nn_[k])) {
                nn_[k] = a;
                nn_d_[k] = d_(k, a);
            }
        }
        refresh(a);
    }

    Partition partition() const {
        std::vector<std::size_t> slots;
        for (std::size_t i = 0; i < n_; ++i) {
            if (active_[i]) {
                slots.push_back(i);
            }
        }
        std::sort(slots.begin(), slots.end(),
                  [&](std::size_t x, std::size_t y) { return key_[x] < key_[y]; });
        Partition p;
        p.labels.assign(n_, 0);
        p.cluster_count = slots.size();
        for (std::size_t label = 0; label < slots.size(); ++label) {
            for (auto item : members_[slots[label]]) {
                p.labels[item] = label;
            }
        }
        return p;
    }

    DistanceMatrix d_;
    Linkage linkage_;
    std::size_t n_;
    std::vector<std::size_t> key_;
    std::vector<char> active_;
    std::vector<std::size_t> size_;
    std::vector<std::size_t> node_;
    std::vector<std::vector<std::size_t>> members_;
    std::vector<std::size_t> nn_;
    std::vector<double> nn_d_;
};

} // namespace

ClusteringResult agglomerate(DistanceMatrix dissimilarity, Linkage linkage, const StopRule& stop,
                             std::span<const std::size_t> item_keys) {
    const std::size_t n = dissimilarity.size();
    if (n == 0) {
        throw InvalidArgument("agglomerate: need at least one item");
    }
    check_stop(stop, n);
    auto keys = resolve_keys(item_keys, n);
    // Slot keys are the item keys of the leaf each slot started as; the
    // merged cluster always stays in the slot with the smaller key, so a
    // slot's key is the minimum over its members.
    Agglomerator engine(std::move(dissimilarity), linkage, std::move(keys));
    return engine.run(stop);
}

ClusteringResult group_average_cluster(const DistanceMatrix& distances, const StopRule& stop,
                                       std::span<const std::size_t> item_keys) {
    return agglomerate(distances, Linkage::group_average, stop, item_keys);
}

ClusteringResult ward_cluster(const MatrixD& rows, const StopRule& stop,
                              std::span<const std::size_t> item_keys) {
    DistanceMatrix cost = squared_euclidean_distances(rows);
    for (std::size_t i = 0; i < cost.size(); ++i) {
        for (std::size_t j = i + 1; j < cost.size(); ++j) {
            cost.set(i, j, 0.5 * cost(i, j));
        }
    }
    return agglomerate(std::move(cost), Linkage::ward, stop, item_keys);
}

std::vector<std::size_t> rank_keys(std::span<const std::string> ids) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return ids[x] < ids[y]; });
    std::vector<std::size_t> rank(ids.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        rank[order[r]] = r;
    }
    return rank;
}

Partition canonical_partition(std::span<const std::size_t> labels,
                              std::span<const std::size_t> item_keys) {
    const auto keys = resolve_keys(item_keys, labels.size());
    std::map<std::size_t, std::size_t> min_key;  // raw label -> smallest key
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, fresh] = min_key.emplace(labels[i], keys[i]);
        if (!fresh) {
            it->second = std::min(it->second, keys[i]);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (key, raw label)
    for (auto [label, key] : min_key) {
        order.emplace_back(key, label);
    }
    std::sort(order.begin(), order.end());
    std::map<std::size_t, std::size_t> relabel;
    for (std::size_t c = 0; c < order.size(); ++c) {
        relabel[order[c].second] = c;
    }
    Partition p;
    p.cluster_count = order.size();
    p.labels.resize(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        p.labels[i] = relabel[labels[i]];
    }
    return p;
}

} // namespace frameforge
