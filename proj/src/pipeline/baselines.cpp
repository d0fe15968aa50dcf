#include <algorithm>
#include <numeric>

#include "frameforge/distance.hpp"
#include "frameforge/error.hpp"
#include "frameforge/linkage.hpp"
#include "frameforge/pipeline.hpp"
#include "verb_groups.hpp"

namespace frameforge {

FrameClustering one_step_baseline(const std::vector<Instance>& instances,
                                  const EmbeddingIndex& embeddings, double alpha,
                                  SecondStepAlgo algo, std::size_t oracle_k) {
    if (instances.empty() || oracle_k < 1 || oracle_k > instances.size()) {
        throw InvalidArgument("one_step_baseline: oracle_k must lie in [1, instance count]");
    }
    if (algo == SecondStepAlgo::none) {
        throw InvalidArgument("one_step_baseline: needs ward or ga");
    }

    // Each instance is a degenerate pLU whose centroid is its own mixed vector.
    std::vector<PseudoLU> plus;
    plus.reserve(instances.size());
    for (const auto& inst : instances) {
        plus.push_back({inst.instance_id, inst.verb_lemma, {inst.instance_id}, {}});
    }
    std::sort(plus.begin(), plus.end(),
              [](const auto& a, const auto& b) { return a.plu_id < b.plu_id; });
    assign_centroids(plus, embeddings, alpha);

    MatrixD rows(plus.size(), embeddings.set().dim);
    for (std::size_t i = 0; i < plus.size(); ++i) {
        std::copy(plus[i].centroid.begin(), plus[i].centroid.end(), rows.row(i).begin());
    }
    const stop::ClusterCount until{oracle_k};
    const auto result = algo == SecondStepAlgo::ward
                            ? ward_cluster(rows, until)
                            : group_average_cluster(euclidean_distances(rows), until);

    FrameClustering fc;
    fc.plu_cluster = result.partition.labels;
    fc.cluster_count = result.partition.cluster_count;
    fc.instance_assignment = compose_assignment(plus, fc.plu_cluster);
    fc.termination.merges = result.dendrogram.merges.size();
    return fc;
}

FrameClustering one_cluster_per_verb_baseline(const std::vector<Instance>& instances) {
    const auto groups = detail::group_by_verb(instances);
    FrameClustering fc;
    fc.cluster_count = groups.size();
    fc.plu_cluster.resize(groups.size());
    std::iota(fc.plu_cluster.begin(), fc.plu_cluster.end(), std::size_t{0});
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (const auto* inst : groups[g].members) {
            fc.instance_assignment.emplace(inst->instance_id, g);
        }
    }
    fc.termination.p_same_cluster = pair_ratio(0, groups.size());
    return fc;
}

std::vector<Instance> strip_gold(const std::vector<Instance>& instances) {
    auto out = instances;
    for (auto& inst : out) {
        inst.gold_frame.clear();
        inst.gold_lu.clear();
    }
    return out;
}

EvalReport score(const std::map<std::string, std::size_t>& assignment,
                 const std::vector<Instance>& instances) {
    if (assignment.size() != instances.size()) {
        throw InvalidArgument("score: assignment covers " + std::to_string(assignment.size()) +
                              " instances, gold has " + std::to_string(instances.size()));
    }
    std::map<std::string, std::string> predicted, gold;
    for (const auto& inst : instances) {
        auto it = assignment.find(inst.instance_id);
        if (it == assignment.end()) {
            throw InvalidArgument("score: no cluster for instance '" + inst.instance_id + "'");
        }
        predicted.emplace(inst.instance_id, std::to_string(it->second));
        gold.emplace(inst.instance_id, inst.gold_frame);
    }
    return evaluate(predicted, gold);
}

} // namespace frameforge
