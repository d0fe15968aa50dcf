#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "frameforge/distance.hpp"
#include "frameforge/error.hpp"
#include "frameforge/linkage.hpp"
#include "frameforge/pipeline.hpp"
#include "frameforge/rng.hpp"
#include "frameforge/xmeans.hpp"
#include "verb_groups.hpp"

namespace frameforge {

std::string_view to_string(FirstStepAlgo algo) {
    switch (algo) {
    case FirstStepAlgo::xmeans: return "xmeans";
    case FirstStepAlgo::group_average: return "ga";
    case FirstStepAlgo::one_cluster_per_verb: return "1cpv";
    }
    return "?";
}

std::string_view to_string(SecondStepAlgo algo) {
    switch (algo) {
    case SecondStepAlgo::ward: return "ward";
    case SecondStepAlgo::group_average: return "ga";
    case SecondStepAlgo::none: return "none";
    }
    return "?";
}

FirstStepAlgo parse_first_step(std::string_view name) {
    for (auto a : {FirstStepAlgo::xmeans, FirstStepAlgo::group_average,
                   FirstStepAlgo::one_cluster_per_verb}) {
        if (name == to_string(a)) {
            return a;
        }
    }
    throw InvalidArgument(fmt::format("unknown first-step algorithm '{}'", name));
}

SecondStepAlgo parse_second_step(std::string_view name) {
    for (auto a : {SecondStepAlgo::ward, SecondStepAlgo::group_average, SecondStepAlgo::none}) {
        if (name == to_string(a)) {
            return a;
        }
    }
    throw InvalidArgument(fmt::format("unknown second-step algorithm '{}'", name));
}

namespace {

std::vector<std::size_t> cluster_verb(const detail::VerbGroup& group, const EmbeddingIndex& emb,
                                      const FirstStepOptions& options) {
    const std::size_t n = group.members.size();
    if (n == 1 || options.algo == FirstStepAlgo::one_cluster_per_verb) {
        return std::vector<std::size_t>(n, 0);
    }
    const MatrixD rows = detail::mask_rows(group.members, emb);
    if (options.algo == FirstStepAlgo::group_average) {
        return group_average_cluster(euclidean_distances(rows), stop::Threshold{options.theta})
            .partition.labels;
    }
    XMeansOptions xo;
    xo.k_min = 1;
    xo.k_max = n;
    xo.seed = derive_seed(options.seed, group.verb);
    return xmeans_cluster(rows, xo).labels;
}

void check_coverage(const std::vector<Instance>& instances, const EmbeddingIndex& emb) {
    for (const auto& inst : instances) {
        emb.row_of(inst.instance_id);
    }
}

} // namespace

std::vector<PseudoLU> first_step(const std::vector<Instance>& instances,
                                 const EmbeddingIndex& embeddings,
                                 const FirstStepOptions& options) {
    check_coverage(instances, embeddings);
    const auto groups = detail::group_by_verb(instances);

    std::vector<std::vector<PseudoLU>> per_verb(groups.size());
    detail::parallel_for(groups.size(), options.threads, [&](std::size_t g) {
        const auto& group = groups[g];
        const auto labels = cluster_verb(group, embeddings, options);
        const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        auto& out = per_verb[g];
        out.resize(k);
        for (std::size_t c = 0; c < k; ++c) {
            out[c].plu_id = fmt::format("{}#{}", group.verb, c);
            out[c].verb_lemma = group.verb;
        }
        // Members are in id order, so each pLU's ids come out sorted.
        for (std::size_t i = 0; i < labels.size(); ++i) {
            out[labels[i]].instance_ids.push_back(group.members[i]->instance_id);
        }
    });

    std::vector<PseudoLU> plus;
    for (auto& v : per_verb) {
        std::move(v.begin(), v.end(), std::back_inserter(plus));
    }
    assign_centroids(plus, embeddings, options.alpha);
    return plus;
}

void assign_centroids(std::vector<PseudoLU>& plus, const EmbeddingIndex& embeddings,
                      double alpha) {
    const auto& set = embeddings.set();
    const auto& k = kernels::active();
    const MixWeight weight(alpha);
    std::vector<double> row(set.dim);
    for (auto& plu : plus) {
        plu.centroid.assign(set.dim, 0.0);
        for (const auto& id : plu.instance_ids) {
            const auto r = embeddings.row_of(id);
            const float* w = set.word_vectors.row(r).data();
            const float* m = set.mask_vectors.row(r).data();
            if (weight.alpha() == 0.0) {
                k.widen(w, row.data(), set.dim);
            } else if (weight.alpha() == 1.0) {
                k.widen(m, row.data(), set.dim);
            } else {
                k.mix(w, m, weight.alpha(), row.data(), set.dim);
            }
            k.accumulate(plu.centroid.data(), row.data(), set.dim);
        }
        const double inv = 1.0 / static_cast<double>(plu.instance_ids.size());
        for (auto& v : plu.centroid) {
            v *= inv;
        }
    }
}

namespace {

struct VerbDendrogram {
    std::size_t leaves = 0;
    std::vector<double> merge_distances;
    double max_distance = 0.0;
};

std::vector<VerbDendrogram> verb_dendrograms(const std::vector<Instance>& instances,
                                             const EmbeddingIndex& emb) {
    check_coverage(instances, emb);
    std::vector<VerbDendrogram> out;
    for (const auto& group : detail::group_by_verb(instances)) {
        VerbDendrogram vd;
        vd.leaves = group.members.size();
        if (vd.leaves > 1) {
            const auto d = euclidean_distances(detail::mask_rows(group.members, emb));
            vd.max_distance = d.max();
            for (const auto& m : group_average_cluster(d, stop::Full{}).dendrogram.merges) {
                vd.merge_distances.push_back(m.distance);
            }
        }
        out.push_back(std::move(vd));
    }
    return out;
}

// Clusters left when threshold mode stops: it halts at the first merge whose
// distance exceeds theta.
std::size_t count_at(const std::vector<VerbDendrogram>& dendros, double theta) {
    std::size_t total = 0;
    for (const auto& vd : dendros) {
        std::size_t merged = 0;
        while (merged < vd.merge_distances.size() && vd.merge_distances[merged] <= theta) {
            ++merged;
        }
        total += vd.leaves - merged;
    }
    return total;
}

} // namespace

std::size_t first_step_cluster_count(const std::vector<Instance>& instances,
                                     const EmbeddingIndex& embeddings, double theta) {
    return count_at(verb_dendrograms(instances, embeddings), theta);
}

ThetaCalibration calibrate_theta(const std::vector<Instance>& dev,
                                 const EmbeddingIndex& embeddings, std::size_t target,
                                 std::size_t steps) {
    if (steps == 0) {
        throw InvalidArgument("calibrate_theta: steps must be positive");
    }
    const auto dendros = verb_dendrograms(dev, embeddings);
    if (target < dendros.size()) {
        throw InvalidArgument(fmt::format(
            "calibrate_theta: target {} is below the number of verbs {}", target, dendros.size()));
    }
    double max_distance = 0.0;
    for (const auto& vd : dendros) {
        max_distance = std::max(max_distance, vd.max_distance);
    }

    ThetaCalibration result;
    bool found = false;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double theta = i == steps ? 0.0
                                        : max_distance * static_cast<double>(steps - i) /
                                              static_cast<double>(steps);
        const std::size_t count = count_at(dendros, theta);
        result.scan.emplace_back(theta, count);
        if (!found && count >= target) {
            result.theta = theta;
            result.cluster_count = count;
            found = true;
        }
    }
    if (!found) {
        throw InvalidArgument(fmt::format(
            "calibrate_theta: target {} unreachable; theta = 0 yields {} clusters", target,
            result.scan.back().second));
    }
    return result;
}

} // namespace frameforge
