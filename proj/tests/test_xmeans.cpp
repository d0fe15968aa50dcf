#include <gtest/gtest.h>

#include <cmath>
#include <algorithm>
#include <numeric>
#include <random>

#include "frameforge/xmeans.hpp"
#include "linkage_replay.hpp"
#include "support.hpp"

using namespace frameforge;

namespace {

MatrixD blobs(std::mt19937_64& gen, const std::vector<std::vector<double>>& centres,
              std::size_t per_blob) {
    std::normal_distribution<double> noise(0.0, 1.0);
    const std::size_t d = centres[0].size();
    MatrixD m(centres.size() * per_blob, d);
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (std::size_t i = 0; i < per_blob; ++i) {
            for (std::size_t k = 0; k < d; ++k) {
                m(c * per_blob + i, k) = centres[c][k] + noise(gen);
            }
        }
    }
    return m;
}

} // namespace

TEST(XMeans, OneGaussianStaysWhole) {
    std::mt19937_64 gen(1);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = blobs(gen, {std::vector<double>(32, 0.0)}, 30);
        EXPECT_EQ(xmeans_cluster(m, {.seed = static_cast<std::uint64_t>(trial)}).cluster_count, 1u);
    }
}

TEST(XMeans, TwoSeparatedGaussiansSplit) {
    std::mt19937_64 gen(2);
    std::vector<double> far(32, 0.0);
    far[0] = 12.0;
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = blobs(gen, {std::vector<double>(32, 0.0), far}, 25);
        const auto p = xmeans_cluster(m, {.seed = static_cast<std::uint64_t>(trial)});
        ASSERT_EQ(p.cluster_count, 2u);
        for (std::size_t i = 0; i < 50; ++i) {
            EXPECT_EQ(p.labels[i], i < 25 ? 0u : 1u);
        }
    }
}

TEST(XMeans, ThreeGaussiansInTwoDimensions) {
    std::mt19937_64 gen(3);
    const auto m = blobs(gen, {{0, 0}, {20, 0}, {0, 20}}, 40);
    EXPECT_EQ(xmeans_cluster(m, {.seed = 9}).cluster_count, 3u);
}

TEST(XMeans, KMinEqualToRowCount) {
    std::mt19937_64 gen(4);
    const auto m = testing_support::random_rows(gen, 5, 3);
    const auto p = xmeans_cluster(m, {.k_min = 5});
    EXPECT_EQ(p.cluster_count, 5u);
}

TEST(XMeans, KMaxCapsSplits) {
    std::mt19937_64 gen(5);
    const auto m = blobs(gen, {{0, 0}, {20, 0}, {0, 20}, {20, 20}}, 20);
    EXPECT_LE(xmeans_cluster(m, {.k_max = 2}).cluster_count, 2u);
}

TEST(XMeans, DeterministicAndOrderFree) {
    std::mt19937_64 gen(6);
    const auto m = blobs(gen, {{0, 0, 0}, {9, 9, 0}}, 15);
    const auto a = xmeans_cluster(m, {.seed = 3});
    EXPECT_EQ(xmeans_cluster(m, {.seed = 3}), a);

    std::vector<std::size_t> order(m.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), gen);
    MatrixD permuted(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k) permuted(i, k) = m(order[i], k);
    const auto b = xmeans_cluster(permuted, {.seed = 3}, order);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        EXPECT_EQ(b.labels[i], a.labels[order[i]]);
    }
}

TEST(XMeans, SingleRow) {
    MatrixD m(1, 4, 1.0);
    EXPECT_EQ(xmeans_cluster(m, {}).cluster_count, 1u);
}

TEST(SphericalBic, MatchesTermByTermFormula) {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 6 + gen() % 20, d = 1 + gen() % 6, k = 1 + gen() % 3;
        const auto m = testing_support::random_rows(gen, n, d);
        std::vector<std::size_t> labels(n);
        for (std::size_t i = 0; i < n; ++i) labels[i] = i % k;
        MatrixD centers(k, d, 0.0);
        std::vector<double> counts(k, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            counts[labels[i]] += 1;
            for (std::size_t j = 0; j < d; ++j) centers(labels[i], j) += m(i, j);
        }
        for (std::size_t c = 0; c < k; ++c)
            for (std::size_t j = 0; j < d; ++j) centers(c, j) /= counts[c];
        const double expect =
            oracle::spherical_bic(oracle::to_rows(m), labels, oracle::to_rows(centers));
        EXPECT_NEAR(spherical_bic(m, labels, centers), expect, 1e-9 * std::abs(expect));
    }
}

TEST(SphericalBic, UndefinedWithoutSpareRows) {
    MatrixD m(2, 2, std::vector<double>{0, 0, 1, 1});
    const std::vector<std::size_t> labels{0, 1};
    EXPECT_EQ(spherical_bic(m, labels, m), -std::numeric_limits<double>::infinity());
}

TEST(SphericalBic, PrefersTwoCentresForTwoBlobs) {
    std::mt19937_64 gen(8);
    const auto m = blobs(gen, {{0, 0}, {15, 0}}, 30);
    std::vector<std::size_t> one(60, 0), two(60);
    for (std::size_t i = 0; i < 60; ++i) two[i] = i < 30 ? 0 : 1;
    MatrixD c1(1, 2, 0.0), c2(2, 2, 0.0);
    for (std::size_t i = 0; i < 60; ++i) {
        for (std::size_t k = 0; k < 2; ++k) {
            c1(0, k) += m(i, k) / 60;
            c2(two[i], k) += m(i, k) / 30;
        }
    }
    EXPECT_GT(spherical_bic(m, two, c2), spherical_bic(m, one, c1));
}
