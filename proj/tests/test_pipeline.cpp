#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "frameforge/error.hpp"
#include "frameforge/pipeline.hpp"
#include "frameforge/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace frameforge;
using testing_support::instance;

namespace {

PseudoLU plu(const std::string& id, std::vector<double> centroid) {
    return {id, id.substr(0, id.find('#')), {id + "-0"}, std::move(centroid)};
}

struct Fixture {
    SyntheticData data;
    std::vector<Instance> dev, test;

    explicit Fixture(std::uint64_t seed, std::size_t verbs = 40) {
        SyntheticOptions o;
        o.seed = seed;
        o.verbs = verbs;
        o.frames = 8;
        o.dim = 16;
        data = make_synthetic(o);
        const auto split = split_corpus(data.corpus, {0.5, seed, 0.05});
        dev = select_verbs(data.corpus, split.dev_verbs);
        test = select_verbs(data.corpus, split.test_verbs);
    }
};

std::vector<LayerCandidate> layers(const EmbeddingSet& set) { return {{set.layer_spec, &set}}; }

} // namespace

TEST(PDev, FivePairsExample) {
    const std::vector<std::pair<std::string, std::string>> lus{
        {"a.v::A", "A"}, {"b.v::A", "A"}, {"c.v::B", "B"}, {"d.v::B", "B"}, {"e.v::C", "C"}};
    EXPECT_DOUBLE_EQ(compute_p_dev(lus), 0.2);
    auto with_duplicates = lus;
    with_duplicates.push_back(lus[0]);
    EXPECT_DOUBLE_EQ(compute_p_dev(with_duplicates), 0.2);
}

TEST(PDev, MatchesPairwiseCount) {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<std::pair<std::string, std::string>> lus;
        const std::size_t n = 2 + gen() % 25;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string frame = "F" + std::to_string(gen() % 5);
            lus.emplace_back("v" + std::to_string(i) + ".v::" + frame, frame);
        }
        EXPECT_NEAR(compute_p_dev(lus), oracle::lu_pair_ratio(lus), 1e-15);
    }
}

TEST(PDev, FromInstancesCountsLusOnce) {
    const std::vector<Instance> inst{instance("1", "run", "Motion"), instance("2", "run", "Motion"),
                                     instance("3", "walk", "Motion"), instance("4", "eat", "Ingestion")};
    // LUs run/Motion, walk/Motion, eat/Ingestion: 1 of 3 pairs.
    EXPECT_DOUBLE_EQ(compute_p_dev(inst), 1.0 / 3.0);
}

TEST(SecondStep, FourSingletonsOneSixthStopsAfterOneMerge) {
    const std::vector<PseudoLU> plus{plu("a#0", {0, 0}), plu("b#0", {1, 0}), plu("c#0", {5, 5}),
                                     plu("d#0", {9, 0})};
    for (auto algo : {SecondStepAlgo::group_average, SecondStepAlgo::ward}) {
        const auto fc = second_step(plus, algo, 1.0 / 6.0);
        EXPECT_EQ(fc.termination.merges, 1u);
        EXPECT_EQ(fc.cluster_count, 3u);
        EXPECT_EQ(fc.plu_cluster[0], fc.plu_cluster[1]);
        EXPECT_EQ(fc.termination.plu_pair_total, 6u);
        EXPECT_DOUBLE_EQ(fc.termination.p_same_cluster, 1.0 / 6.0);
    }
}

TEST(SecondStep, PDevOneGivesSingleCluster) {
    std::mt19937_64 gen(5);
    std::vector<PseudoLU> plus;
    for (int i = 0; i < 9; ++i) {
        plus.push_back(plu("v" + std::to_string(i) + "#0", {double(gen() % 100), double(gen() % 100)}));
    }
    const auto fc = second_step(plus, SecondStepAlgo::group_average, 1.0);
    EXPECT_EQ(fc.cluster_count, 1u);
    EXPECT_EQ(fc.termination.p_same_cluster, 1.0);
}

TEST(SecondStep, RatioTrajectoryMatchesPairCount) {
    std::mt19937_64 gen(7);
    std::vector<PseudoLU> plus;
    for (int i = 0; i < 12; ++i) {
        std::vector<double> c(3);
        for (auto& x : c) x = std::normal_distribution<double>(0, 5)(gen);
        plus.push_back(plu("v" + std::to_string(i) + "#0", c));
    }
    const auto fc = second_step(plus, SecondStepAlgo::ward, 0.3);
    const auto& t = fc.termination.trajectory;
    ASSERT_FALSE(t.empty());
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
    EXPECT_GE(t.back(), 0.3);
    if (t.size() > 1) {
        EXPECT_LT(t[t.size() - 2], 0.3);
    }
    EXPECT_DOUBLE_EQ(t.back(), oracle::pair_ratio(fc.plu_cluster));
}

TEST(SecondStep, NoneKeepsSingletons) {
    const std::vector<PseudoLU> plus{plu("a#0", {0}), plu("b#0", {1})};
    const auto fc = second_step(plus, SecondStepAlgo::none, 0.5);
    EXPECT_EQ(fc.cluster_count, 2u);
}

TEST(SecondStep, RejectsBadPDev) {
    const std::vector<PseudoLU> plus{plu("a#0", {0}), plu("b#0", {1})};
    EXPECT_THROW(second_step(plus, SecondStepAlgo::ward, 1.5), InvalidArgument);
    EXPECT_THROW(second_step(plus, SecondStepAlgo::ward, -0.1), InvalidArgument);
}

TEST(PairRatio, Basics) {
    EXPECT_EQ(pair_ratio(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(pair_ratio(1, 4), 1.0 / 6.0);
}

TEST(FirstStep, OneClusterPerVerb) {
    Fixture f(1, 18);
    EmbeddingIndex index(f.data.embeddings);
    const auto plus = first_step(f.data.corpus.instances, index,
                                 {.algo = FirstStepAlgo::one_cluster_per_verb});
    EXPECT_EQ(plus.size(), 18u);
    std::set<std::string> ids;
    for (const auto& p : plus) {
        EXPECT_EQ(p.plu_id, p.verb_lemma + "#0");
        ids.insert(p.instance_ids.begin(), p.instance_ids.end());
    }
    EXPECT_EQ(ids.size(), f.data.corpus.instances.size());
}

TEST(FirstStep, XMeansRecoversPlantedSenses) {
    Fixture f(2, 30);
    EmbeddingIndex index(f.data.embeddings);
    const auto plus = first_step(f.data.corpus.instances, index, {.algo = FirstStepAlgo::xmeans, .seed = 4});
    std::map<std::string, std::string> frame_of;
    for (const auto& inst : f.data.corpus.instances) frame_of[inst.instance_id] = inst.gold_frame;
    std::size_t pure = 0;
    for (const auto& p : plus) {
        std::set<std::string> frames;
        for (const auto& id : p.instance_ids) frames.insert(frame_of[id]);
        pure += frames.size() == 1;
        EXPECT_TRUE(std::is_sorted(p.instance_ids.begin(), p.instance_ids.end()));
    }
    EXPECT_EQ(pure, plus.size());
    const auto lus = corpus_stats(f.data.corpus.instances).lus;
    EXPECT_GE(plus.size(), lus);
    EXPECT_LE(plus.size(), lus + 2);
}

TEST(FirstStep, MissingEmbeddingNamesInstance) {
    Fixture f(3, 6);
    EmbeddingIndex index(f.data.embeddings);
    auto inst = f.data.corpus.instances;
    inst.push_back(instance("ghost", "verb000", "FRAME_00"));
    try {
        first_step(inst, index, {});
        FAIL();
    } catch (const InvalidArgument& e) {
        EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
    }
}

TEST(FirstStep, ResultIndependentOfThreadsAndOrder) {
    Fixture f(4, 16);
    EmbeddingIndex index(f.data.embeddings);
    const auto a = first_step(f.data.corpus.instances, index, {.seed = 8, .threads = 1});
    auto shuffled = f.data.corpus.instances;
    std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(1));
    const auto b = first_step(shuffled, index, {.seed = 8, .threads = 3});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].plu_id, b[i].plu_id);
        EXPECT_EQ(a[i].instance_ids, b[i].instance_ids);
        EXPECT_EQ(a[i].centroid, b[i].centroid);
    }
}

TEST(CalibrateTheta, MonotoneScanAndBoundaries) {
    Fixture f(5, 12);
    EmbeddingIndex index(f.data.embeddings);
    const auto stats = corpus_stats(f.dev);
    const auto at_verbs = calibrate_theta(f.dev, index, stats.verbs);
    EXPECT_EQ(at_verbs.cluster_count, stats.verbs);
    for (std::size_t i = 1; i < at_verbs.scan.size(); ++i) {
        EXPECT_LT(at_verbs.scan[i].first, at_verbs.scan[i - 1].first);
        EXPECT_GE(at_verbs.scan[i].second, at_verbs.scan[i - 1].second);
    }
    const auto at_instances = calibrate_theta(f.dev, index, f.dev.size());
    EXPECT_EQ(at_instances.cluster_count, f.dev.size());
    EXPECT_EQ(first_step_cluster_count(f.dev, index, at_instances.theta), f.dev.size());

    const auto at_lus = calibrate_theta(f.dev, index, stats.lus);
    EXPECT_GE(at_lus.cluster_count, stats.lus);
    EXPECT_THROW(calibrate_theta(f.dev, index, stats.verbs - 1), InvalidArgument);
    EXPECT_THROW(calibrate_theta(f.dev, index, f.dev.size() + 1), InvalidArgument);
}

TEST(Baselines, OneClusterPerVerb) {
    const std::vector<Instance> inst{instance("1", "run", "Motion"), instance("2", "run", "Self_motion"),
                                     instance("3", "walk", "Motion")};
    const auto fc = one_cluster_per_verb_baseline(inst);
    EXPECT_EQ(fc.cluster_count, 2u);
    EXPECT_EQ(fc.instance_assignment.at("1"), fc.instance_assignment.at("2"));
    EXPECT_NE(fc.instance_assignment.at("1"), fc.instance_assignment.at("3"));
}

TEST(Baselines, OneStepStopsAtOracleCount) {
    Fixture f(6, 10);
    EmbeddingIndex index(f.data.embeddings);
    const auto fc = one_step_baseline(f.test, index, 1.0, SecondStepAlgo::ward, 5);
    EXPECT_EQ(fc.cluster_count, 5u);
    EXPECT_EQ(fc.instance_assignment.size(), f.test.size());
}

TEST(Pipeline, NoPseudoLuIsSplit) {
    for (std::uint64_t seed : {7u, 8u}) {
        Fixture f(seed);
        const auto cands = layers(f.data.embeddings);
        for (auto first : {FirstStepAlgo::xmeans, FirstStepAlgo::group_average,
                           FirstStepAlgo::one_cluster_per_verb}) {
            for (auto second : {SecondStepAlgo::ward, SecondStepAlgo::group_average}) {
                TuneOptions o{.first = first, .second = second, .alpha_grid = {0.0, 0.5, 1.0}, .seed = seed};
                const auto r = run_experiment(f.dev, f.test, cands, o, std::nullopt);
                for (std::size_t i = 0; i < r.plus.size(); ++i) {
                    for (const auto& id : r.plus[i].instance_ids) {
                        EXPECT_EQ(r.clustering.instance_assignment.at(id), r.clustering.plu_cluster[i]);
                    }
                }
                EXPECT_EQ(r.clustering.instance_assignment, compose_assignment(r.plus, r.clustering.plu_cluster));
            }
        }
    }
}

TEST(Pipeline, OneClusterPerVerbComposition) {
    Fixture f(9);
    const auto cands = layers(f.data.embeddings);
    TuneOptions o{.first = FirstStepAlgo::one_cluster_per_verb, .second = SecondStepAlgo::none};
    const auto r = run_experiment(f.dev, f.test, cands, o, std::nullopt);
    const auto direct = one_cluster_per_verb_baseline(f.test);
    EXPECT_EQ(r.clustering.cluster_count, corpus_stats(f.test).verbs);
    EXPECT_EQ(r.report.bcf, score(direct.instance_assignment, f.test).bcf);
}

TEST(Pipeline, TestGoldNeverSteersClustering) {
    Fixture f(10);
    const auto cands = layers(f.data.embeddings);
    auto scrambled = f.test;
    std::vector<std::string> frames;
    for (const auto& inst : scrambled) frames.push_back(inst.gold_frame);
    std::shuffle(frames.begin(), frames.end(), std::mt19937_64(3));
    for (std::size_t i = 0; i < scrambled.size(); ++i) {
        scrambled[i].gold_frame = frames[i];
        scrambled[i].gold_lu = make_gold_lu(scrambled[i].verb_lemma, frames[i]);
    }
    for (bool one_step : {false, true}) {
        TuneOptions o{.first = FirstStepAlgo::xmeans, .second = SecondStepAlgo::group_average,
                      .one_step = one_step, .alpha_grid = {0.2, 0.8}, .seed = 1};
        const auto a = run_experiment(f.dev, f.test, cands, o, std::nullopt);
        const auto b = run_experiment(f.dev, scrambled, cands, o, std::nullopt);
        EXPECT_EQ(a.clustering.instance_assignment, b.clustering.instance_assignment);
        EXPECT_EQ(a.tuning.alpha, b.tuning.alpha);
    }
}

TEST(Tuning, GridCoversLayersAndAlphas) {
    Fixture f(11);
    auto second = f.data.embeddings;
    second.layer_spec = "other";
    std::vector<LayerCandidate> cands{{f.data.embeddings.layer_spec, &f.data.embeddings}, {"other", &second}};
    TuneOptions o{.alpha_grid = default_alpha_grid(), .seed = 2};
    const auto t = tune_hyperparameters(f.dev, cands, o);
    EXPECT_EQ(t.grid.size(), 22u);
    EXPECT_EQ(t.layer_index, 0u);  // identical layers tie; the earlier wins
    double best = 0.0;
    for (const auto& g : t.grid) best = std::max(best, g.report.bcf);
    EXPECT_EQ(t.dev_bcf, best);
    EXPECT_DOUBLE_EQ(t.p_dev, compute_p_dev(f.dev));
}

TEST(Tuning, AlphaGrid) {
    const auto g = default_alpha_grid();
    ASSERT_EQ(g.size(), 11u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_DOUBLE_EQ(g[3], 0.3);
}

TEST(Algorithms, NamesRoundTrip) {
    for (auto a : {FirstStepAlgo::xmeans, FirstStepAlgo::group_average, FirstStepAlgo::one_cluster_per_verb}) {
        EXPECT_EQ(parse_first_step(to_string(a)), a);
    }
    for (auto a : {SecondStepAlgo::ward, SecondStepAlgo::group_average, SecondStepAlgo::none}) {
        EXPECT_EQ(parse_second_step(to_string(a)), a);
    }
    EXPECT_THROW(parse_first_step("kmeans"), InvalidArgument);
}

TEST(StripGold, BlanksLabels) {
    const auto s = strip_gold({instance("1", "run", "Motion")});
    EXPECT_TRUE(s[0].gold_frame.empty());
    EXPECT_TRUE(s[0].gold_lu.empty());
    EXPECT_EQ(s[0].verb_lemma, "run");
}
