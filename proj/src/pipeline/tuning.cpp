#include <algorithm>
#include <set>

#include <fmt/format.h>

#include "frameforge/error.hpp"
#include "frameforge/pipeline.hpp"

namespace frameforge {

namespace {

std::size_t distinct_frames(const std::vector<Instance>& instances) {
    std::set<std::string> frames;
    for (const auto& inst : instances) {
        frames.insert(inst.gold_frame);
    }
    return frames.size();
}

std::size_t distinct_verbs(const std::vector<Instance>& instances) {
    std::set<std::string> verbs;
    for (const auto& inst : instances) {
        verbs.insert(inst.verb_lemma);
    }
    return verbs.size();
}

std::size_t theta_target(const std::vector<Instance>& dev, ThetaTarget target) {
    if (target == ThetaTarget::lus) {
        return corpus_stats(dev).lus;
    }
    // Per-verb clustering never yields fewer clusters than verbs.
    return std::max(distinct_frames(dev), distinct_verbs(dev));
}

bool is_baseline(const TuneOptions& o) {
    return !o.one_step && o.first == FirstStepAlgo::one_cluster_per_verb &&
           o.second == SecondStepAlgo::none;
}

} // namespace

std::vector<double> default_alpha_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) {
        grid.push_back(i / 10.0);
    }
    return grid;
}

TuneResult tune_hyperparameters(const std::vector<Instance>& dev,
                                std::span<const LayerCandidate> layers,
                                const TuneOptions& options) {
    if (layers.empty() || options.alpha_grid.empty()) {
        throw InvalidArgument("tune_hyperparameters: layer and alpha grids must be non-empty");
    }
    if (dev.empty()) {
        throw InvalidArgument("tune_hyperparameters: development side is empty");
    }

    TuneResult best;
    bool have_best = false;
    double best_pif = 0.0;
    if (options.second != SecondStepAlgo::none && !options.one_step) {
        best.p_dev = compute_p_dev(dev);
    }

    for (std::size_t li = 0; li < layers.size(); ++li) {
        const EmbeddingIndex index(*layers[li].embeddings);
        std::optional<double> theta;
        std::vector<PseudoLU> plus;

        if (!options.one_step) {
            if (options.first == FirstStepAlgo::group_average) {
                theta = options.fixed_theta
                            ? *options.fixed_theta
                            : calibrate_theta(dev, index, theta_target(dev, options.theta_target))
                                  .theta;
            }
            FirstStepOptions fo;
            fo.algo = options.first;
            fo.theta = theta.value_or(0.0);
            fo.seed = options.seed;
            fo.threads = options.threads;
            plus = first_step(dev, index, fo);
        }

        for (double alpha : options.alpha_grid) {
            FrameClustering fc;
            if (options.one_step) {
                fc = one_step_baseline(dev, index, alpha, options.second, distinct_frames(dev));
            } else if (is_baseline(options)) {
                fc = one_cluster_per_verb_baseline(dev);
            } else {
                assign_centroids(plus, index, options.mask_centroids ? 1.0 : alpha);
                fc = second_step(plus, options.second, best.p_dev);
            }
            GridPoint point{layers[li].layer_spec, alpha, theta, score(fc.instance_assignment, dev)};
            if (!options.one_step && !is_baseline(options)) {
                point.report.n_plus = plus.size();
            }

            const double bcf = point.report.bcf;
            const double pif = point.report.pif;
            const bool better =
                !have_best || bcf > best.dev_bcf ||
                (bcf == best.dev_bcf &&
                 (pif > best_pif ||
                  (pif == best_pif &&
                   (alpha > best.alpha || (alpha == best.alpha && li < best.layer_index)))));
            if (better) {
                best.alpha = alpha;
                best.layer_spec = layers[li].layer_spec;
                best.layer_index = li;
                best.theta = theta;
                best.dev_bcf = bcf;
                best_pif = pif;
                have_best = true;
            }
            best.grid.push_back(std::move(point));
        }
    }
    return best;
}

ExperimentResult run_experiment(const std::vector<Instance>& dev,
                                const std::vector<Instance>& test,
                                std::span<const LayerCandidate> layers,
                                const TuneOptions& options, std::optional<double> fixed_alpha) {
    if (test.empty()) {
        throw InvalidArgument("run_experiment: test side is empty");
    }
    if (layers.empty()) {
        throw InvalidArgument("run_experiment: no embedding layers supplied");
    }

    ExperimentResult result;
    TuneOptions tune = options;
    if (fixed_alpha) {
        tune.alpha_grid = {*fixed_alpha};
    }
    if (tune.alpha_grid.empty()) {
        tune.alpha_grid = default_alpha_grid();
    }

    if (is_baseline(options)) {
        result.tuning.alpha = tune.alpha_grid.front();
        result.tuning.layer_spec = layers.front().layer_spec;
    } else {
        const bool needs_dev = options.one_step || options.second != SecondStepAlgo::none ||
                               (options.first == FirstStepAlgo::group_average &&
                                !options.fixed_theta) ||
                               tune.alpha_grid.size() > 1 || layers.size() > 1;
        if (needs_dev) {
            result.tuning = tune_hyperparameters(dev, layers, tune);
        } else {
            result.tuning.alpha = tune.alpha_grid.front();
            result.tuning.layer_spec = layers.front().layer_spec;
            result.tuning.theta = options.fixed_theta;
        }
    }

    const auto& chosen = *layers[result.tuning.layer_index].embeddings;
    const EmbeddingIndex index(chosen);
    const auto blind = strip_gold(test);
    const double alpha = result.tuning.alpha;

    if (is_baseline(options)) {
        result.clustering = one_cluster_per_verb_baseline(blind);
    } else if (options.one_step) {
        // The one-step baseline is given the true number of test frames.
        result.clustering = one_step_baseline(blind, index, alpha, options.second,
                                              distinct_frames(test));
    } else {
        FirstStepOptions fo;
        fo.algo = options.first;
        fo.theta = result.tuning.theta.value_or(0.0);
        fo.seed = options.seed;
        fo.alpha = options.mask_centroids ? 1.0 : alpha;
        fo.threads = options.threads;
        result.plus = first_step(blind, index, fo);
        result.clustering = second_step(result.plus, options.second, result.tuning.p_dev);
    }

    result.report = score(result.clustering.instance_assignment, test);
    if (!result.plus.empty()) {
        result.report.n_plus = result.plus.size();
    }
    return result;
}

} // namespace frameforge
