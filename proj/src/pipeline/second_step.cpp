#include <algorithm>
#include <numeric>
#include <set>

#include "frameforge/error.hpp"
#include "frameforge/linkage.hpp"
#include "frameforge/pipeline.hpp"

namespace frameforge {

double pair_ratio(std::size_t same_pairs, std::size_t item_count) {
    if (item_count < 2) {
        return 1.0;
    }
    const std::size_t total = item_count * (item_count - 1) / 2;
    return static_cast<double>(same_pairs) / static_cast<double>(total);
}

std::map<std::string, std::size_t> compose_assignment(const std::vector<PseudoLU>& plus,
                                                      const std::vector<std::size_t>& plu_cluster) {
    std::map<std::string, std::size_t> out;
    for (std::size_t p = 0; p < plus.size(); ++p) {
        for (const auto& id : plus[p].instance_ids) {
            out.emplace(id, plu_cluster[p]);
        }
    }
    return out;
}

FrameClustering second_step(const std::vector<PseudoLU>& plus, SecondStepAlgo algo, double p_dev) {
    if (plus.empty()) {
        throw InvalidArgument("second_step: no pLUs to cluster");
    }
    if (algo != SecondStepAlgo::none && !(p_dev > 0.0 && p_dev <= 1.0)) {
        throw InvalidArgument("second_step: p_dev must lie in (0, 1]");
    }
    const std::size_t n = plus.size();

    FrameClustering fc;
    auto& term = fc.termination;
    term.p_dev = p_dev;
    term.plu_pair_total = n * (n - 1) / 2;

    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& p : plus) {
        ids.push_back(p.plu_id);
    }
    const auto keys = rank_keys(ids);

    std::size_t same = 0;
    if (algo == SecondStepAlgo::none || pair_ratio(0, n) >= p_dev) {
        std::vector<std::size_t> singletons(n);
        std::iota(singletons.begin(), singletons.end(), std::size_t{0});
        const auto part = canonical_partition(singletons, keys);
        fc.plu_cluster = part.labels;
        fc.cluster_count = part.cluster_count;
    } else {
        const std::size_t dim = plus.front().centroid.size();
        MatrixD rows(n, dim);
        for (std::size_t i = 0; i < n; ++i) {
            if (plus[i].centroid.size() != dim) {
                throw InvalidArgument("second_step: pLU centroids differ in dimension");
            }
            std::copy(plus[i].centroid.begin(), plus[i].centroid.end(), rows.row(i).begin());
        }
        stop::Callback until_ratio{[&](const stop::MergeEvent& e) {
            // Merging clusters of sizes a and b co-clusters a*b new pLU pairs.
            same += e.first_size * e.second_size;
            const double p = pair_ratio(same, n);
            term.trajectory.push_back(p);
            return p >= p_dev;
        }};
        const auto result = algo == SecondStepAlgo::ward
                                ? ward_cluster(rows, until_ratio, keys)
                                : group_average_cluster(euclidean_distances(rows), until_ratio, keys);
        fc.plu_cluster = result.partition.labels;
        fc.cluster_count = result.partition.cluster_count;
    }
    term.merges = term.trajectory.size();
    term.p_same_cluster = pair_ratio(same, n);
    fc.instance_assignment = compose_assignment(plus, fc.plu_cluster);
    return fc;
}

double compute_p_dev(const std::vector<std::pair<std::string, std::string>>& lus) {
    const std::set<std::pair<std::string, std::string>> distinct(lus.begin(), lus.end());
    if (distinct.size() < 2) {
        throw InvalidArgument("compute_p_dev: need at least 2 LUs");
    }
    std::map<std::string, std::size_t> per_frame;
    for (const auto& [lu, frame] : distinct) {
        ++per_frame[frame];
    }
    std::size_t same = 0;
    for (const auto& [frame, count] : per_frame) {
        same += count * (count - 1) / 2;
    }
    return pair_ratio(same, distinct.size());
}

double compute_p_dev(const std::vector<Instance>& instances) {
    std::vector<std::pair<std::string, std::string>> lus;
    lus.reserve(instances.size());
    for (const auto& inst : instances) {
        lus.emplace_back(inst.gold_lu, inst.gold_frame);
    }
    return compute_p_dev(lus);
}

} // namespace frameforge
