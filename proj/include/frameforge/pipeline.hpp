#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "frameforge/corpus.hpp"
#include "frameforge/embeddings.hpp"
#include "frameforge/metrics.hpp"

namespace frameforge {

enum class FirstStepAlgo { xmeans, group_average, one_cluster_per_verb };
enum class SecondStepAlgo { ward, group_average, none };

/// Short names used on the command line and in manifests:
/// xmeans/ga/1cpv and ward/ga/none.
std::string_view to_string(FirstStepAlgo algo);
std::string_view to_string(SecondStepAlgo algo);
FirstStepAlgo parse_first_step(std::string_view name);
SecondStepAlgo parse_second_step(std::string_view name);

/// Pseudo lexical unit: a first-step cluster of instances of one verb.
struct PseudoLU {
    std::string plu_id;
    std::string verb_lemma;
    std::vector<std::string> instance_ids;  // sorted
    std::vector<double> centroid;
};

struct FirstStepOptions {
    FirstStepAlgo algo = FirstStepAlgo::xmeans;
    double theta = 0.0;       // group-average threshold
    std::uint64_t seed = 0;   // X-means seed; each verb derives its own stream
    double alpha = 1.0;       // mix weight of the centroids
    std::size_t threads = 1;
};

/// Clusters the instances of each verb separately on masked vectors only.
/// pLUs come back ordered by verb, then by smallest instance id. Throws
/// InvalidArgument when an instance has no embedding row.
std::vector<PseudoLU> first_step(const std::vector<Instance>& instances,
                                 const EmbeddingIndex& embeddings,
                                 const FirstStepOptions& options);

/// Sets every centroid to the mean of its members' mixed vectors.
void assign_centroids(std::vector<PseudoLU>& plus, const EmbeddingIndex& embeddings,
                      double alpha);

struct ThetaCalibration {
    double theta = 0.0;
    std::size_t cluster_count = 0;
    /// (theta, total first-step clusters) at every grid point, descending theta.
    std::vector<std::pair<double, std::size_t>> scan;
};

/// Scans a descending grid from the largest within-verb mask distance to 0
/// (`steps` uniform steps) and returns the largest theta whose total
/// group-average cluster count reaches `target`.
ThetaCalibration calibrate_theta(const std::vector<Instance>& dev,
                                 const EmbeddingIndex& embeddings, std::size_t target,
                                 std::size_t steps = 200);

/// Total first-step group-average clusters at threshold theta.
std::size_t first_step_cluster_count(const std::vector<Instance>& instances,
                                     const EmbeddingIndex& embeddings, double theta);

struct TerminationStats {
    double p_same_cluster = 0.0;
    double p_dev = 0.0;
    std::size_t plu_pair_total = 0;
    std::size_t merges = 0;
    /// p_same_cluster after each merge.
    std::vector<double> trajectory;
};

struct FrameClustering {
    std::vector<std::size_t> plu_cluster;  // parallel to the pLU list
    std::size_t cluster_count = 0;
    std::map<std::string, std::size_t> instance_assignment;
    TerminationStats termination;
};

/// Fraction of pLU pairs sharing a cluster: same_pairs / all_pairs, with a
/// single pLU counting as fully merged.
double pair_ratio(std::size_t same_pairs, std::size_t item_count);

/// Agglomerates pLU centroids across verbs and stops at the first merge
/// after which the fraction of co-clustered pLU pairs is >= p_dev.
FrameClustering second_step(const std::vector<PseudoLU>& plus, SecondStepAlgo algo, double p_dev);

/// Fraction of distinct-LU pairs that share a frame. Input is the set of
/// (lu, frame) pairs; duplicates are ignored.
double compute_p_dev(const std::vector<std::pair<std::string, std::string>>& lus);
double compute_p_dev(const std::vector<Instance>& instances);

/// Clusters all instances across verbs at once, stopping at oracle_k
/// clusters. Every instance is reported as its own pLU.
FrameClustering one_step_baseline(const std::vector<Instance>& instances,
                                  const EmbeddingIndex& embeddings, double alpha,
                                  SecondStepAlgo algo, std::size_t oracle_k);

/// One cluster per verb lemma, no second step.
FrameClustering one_cluster_per_verb_baseline(const std::vector<Instance>& instances);

/// The composition instance -> pLU -> cluster.
std::map<std::string, std::size_t> compose_assignment(const std::vector<PseudoLU>& plus,
                                                      const std::vector<std::size_t>& plu_cluster);

/// Copies of `instances` with gold_frame and gold_lu blanked, so the
/// clustering path cannot consult them.
std::vector<Instance> strip_gold(const std::vector<Instance>& instances);

/// Scores an instance assignment against the gold frames of `instances`.
EvalReport score(const std::map<std::string, std::size_t>& assignment,
                 const std::vector<Instance>& instances);

enum class ThetaTarget { lus, frames };

struct LayerCandidate {
    std::string layer_spec;
    const EmbeddingSet* embeddings = nullptr;
};

struct TuneOptions {
    FirstStepAlgo first = FirstStepAlgo::xmeans;
    SecondStepAlgo second = SecondStepAlgo::group_average;
    bool one_step = false;
    std::vector<double> alpha_grid;
    std::optional<double> fixed_theta;  // skips calibration
    ThetaTarget theta_target = ThetaTarget::lus;
    bool mask_centroids = false;  // second-step centroids from masked vectors only
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

struct GridPoint {
    std::string layer_spec;
    double alpha = 0.0;
    std::optional<double> theta;
    EvalReport report;
};

struct TuneResult {
    double alpha = 0.0;
    std::string layer_spec;
    std::size_t layer_index = 0;
    std::optional<double> theta;
    double p_dev = 0.0;
    double dev_bcf = 0.0;
    std::vector<GridPoint> grid;
};

/// The inclusive 0.0..1.0 grid in steps of 0.1.
std::vector<double> default_alpha_grid();

/// Exhaustive search over layers and alpha on the development side, scored
/// by B-cubed F1. Ties go to the higher purity F1, then the larger alpha,
/// then the earlier layer.
TuneResult tune_hyperparameters(const std::vector<Instance>& dev,
                                std::span<const LayerCandidate> layers,
                                const TuneOptions& options);

/// Test-side outcome of one configured run.
struct ExperimentResult {
    TuneResult tuning;
    std::vector<PseudoLU> plus;
    FrameClustering clustering;
    EvalReport report;
};

/// Tunes on `dev` (unless alpha/theta are fixed in `options`) and clusters
/// `test`. Test-side gold labels are read only for scoring and, in one-step
/// mode, for the oracle cluster count.
ExperimentResult run_experiment(const std::vector<Instance>& dev,
                                const std::vector<Instance>& test,
                                std::span<const LayerCandidate> layers,
                                const TuneOptions& options, std::optional<double> fixed_alpha);

} // namespace frameforge
