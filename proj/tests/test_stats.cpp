#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace naibx;

namespace {

GaussianMoments stream(std::initializer_list<double> values) {
    GaussianMoments g;
    for (double v : values) g = gaussian_update(g, v);
    return g;
}

}  // namespace

TEST(GaussianMoments, SmallStreams) {
    auto g = stream({1, 2, 3});
    EXPECT_EQ(g.count, 3u);
    EXPECT_DOUBLE_EQ(g.mean, 2.0);
    EXPECT_DOUBLE_EQ(g.m2, 2.0);
    EXPECT_DOUBLE_EQ(g.sample_variance(), 1.0);

    g = stream({7});
    EXPECT_EQ(g.count, 1u);
    EXPECT_DOUBLE_EQ(g.mean, 7.0);
    EXPECT_DOUBLE_EQ(g.m2, 0.0);

    g = stream({5, 5, 5, 5});
    EXPECT_DOUBLE_EQ(g.mean, 5.0);
    EXPECT_DOUBLE_EQ(g.m2, 0.0);
}

TEST(GaussianMoments, RejectsNonFinite) {
    GaussianMoments g;
    EXPECT_THROW(gaussian_update(g, std::nan("")), Error);
    EXPECT_THROW(gaussian_update(g, INFINITY), Error);
}

TEST(GaussianMoments, MatchesTwoPassOracle) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t len = 2 + naibx::uniform_below(rng, trial < 190 ? 500 : 10000);
        std::normal_distribution<double> d(std::uniform_real_distribution<double>(-1e3, 1e3)(rng), 10.0);
        std::vector<double> values(len);
        for (auto& v : values) v = d(rng);
        GaussianMoments g;
        for (double v : values) g = gaussian_update(g, v);
        const auto batch = fixtures::batch_moments(values);
        EXPECT_TRUE(fixtures::close_rel(g.mean, batch.mean, 1e-9));
        EXPECT_TRUE(fixtures::close_rel(g.sample_variance(), batch.m2 / static_cast<double>(len - 1), 1e-9));
    }
}

TEST(GaussianMoments, OrderInvariance) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d(3.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values(100);
        for (auto& v : values) v = d(rng);
        GaussianMoments a, b;
        for (double v : values) a.update(v);
        std::shuffle(values.begin(), values.end(), rng);
        for (double v : values) b.update(v);
        EXPECT_EQ(a.count, b.count);
        EXPECT_TRUE(fixtures::close_rel(a.mean, b.mean, 1e-9));
        EXPECT_TRUE(fixtures::close_rel(a.m2, b.m2, 1e-9));
    }
}

TEST(GaussianMoments, PairwiseMergeEqualsConcatenation) {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> d(-4.0, 3.0);
    GaussianMoments left, right, whole;
    for (int i = 0; i < 37; ++i) {
        const double v = d(rng);
        left.update(v);
        whole.update(v);
    }
    for (int i = 0; i < 91; ++i) {
        const double v = d(rng);
        right.update(v);
        whole.update(v);
    }
    const auto merged = merge_moments(left, right);
    EXPECT_EQ(merged.count, whole.count);
    EXPECT_TRUE(fixtures::close_rel(merged.mean, whole.mean, 1e-12));
    EXPECT_TRUE(fixtures::close_rel(merged.m2, whole.m2, 1e-12));
    EXPECT_EQ(merge_moments(GaussianMoments{}, whole), whole);
}

TEST(GaussianDensity, StandardNormalAtMean) {
    const auto g = stream({-1, 1});  // mean 0, sample variance 2
    GaussianMoments unit{3, 0.0, 2.0};  // mean 0, sample variance 1
    const double expected = -0.5 * std::log(2.0 * std::numbers::pi);
    EXPECT_NEAR(*gaussian_log_density(unit, 0.0, 1e-9, DegeneratePolicy::prior_only), expected, 1e-12);
    EXPECT_NEAR(expected, -0.9189385332, 1e-9);
    const double at_mean = *gaussian_log_density(unit, 0.0, 1e-9, DegeneratePolicy::prior_only);
    const double one_sd = *gaussian_log_density(unit, 1.0, 1e-9, DegeneratePolicy::prior_only);
    EXPECT_NEAR(one_sd - at_mean, -0.5, 1e-12);
    EXPECT_NEAR(*gaussian_log_density(g, 0.0, 1e-9, DegeneratePolicy::prior_only),
                -0.5 * std::log(2.0 * std::numbers::pi * 2.0), 1e-12);
}

TEST(GaussianDensity, DegenerateStates) {
    const auto one = stream({4});
    EXPECT_FALSE(gaussian_log_density(one, 4.0, 1e-9, DegeneratePolicy::prior_only).has_value());
    EXPECT_FALSE(gaussian_log_density(GaussianMoments{}, 4.0, 1e-9, DegeneratePolicy::prior_only).has_value());
    const auto floored = gaussian_log_density(one, 4.0, 0.5, DegeneratePolicy::floor);
    ASSERT_TRUE(floored.has_value());
    EXPECT_NEAR(*floored, -0.5 * std::log(2.0 * std::numbers::pi * 0.5), 1e-12);
}

TEST(GaussianDensity, ConstantFeatureUsesFloor) {
    const auto constant = stream({2, 2, 2});
    const auto d = gaussian_log_density(constant, 2.0, 1e-9, DegeneratePolicy::prior_only);
    ASSERT_TRUE(d.has_value());
    EXPECT_TRUE(std::isfinite(*d));
    EXPECT_NEAR(*d, -0.5 * std::log(2.0 * std::numbers::pi * 1e-9), 1e-9);
    EXPECT_DOUBLE_EQ(variance_floor(stream({0, 0, 0})), kAbsoluteVarianceFloor);
    EXPECT_DOUBLE_EQ(variance_floor(GaussianMoments{3, 0.0, 2e6}), 1.0);
}

TEST(Smoothing, WorkedValues) {
    SmoothedCategorical empty(3);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_DOUBLE_EQ(smoothed_probability(empty, c), 1.0 / 3.0);

    SmoothedCategorical two(2);
    two.add(0, 2);
    EXPECT_DOUBLE_EQ(smoothed_probability(two, 0), 3.0 / 4.0);
    EXPECT_DOUBLE_EQ(smoothed_probability(two, 1), 1.0 / 4.0);

    SmoothedCategorical excl(4, 2);
    excl.add(0, 3);
    EXPECT_EQ(smoothed_probability(excl, 2), 0.0);
    EXPECT_DOUBLE_EQ(smoothed_probability(excl, 0), 4.0 / 6.0);
    EXPECT_THROW(excl.add(2), Error);
    EXPECT_THROW(smoothed_probability(excl, 4), Error);
}

TEST(Smoothing, NormalizesForRandomTables) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t k = 2 + naibx::uniform_below(rng, 15);
        std::optional<std::size_t> excluded;
        if (trial % 2) excluded = naibx::uniform_below(rng, k);
        SmoothedCategorical cat(k, excluded);
        const int draws = static_cast<int>(naibx::uniform_below(rng, 200));
        for (int i = 0; i < draws; ++i) {
            const std::size_t c = naibx::uniform_below(rng, k);
            if (c != excluded) cat.add(c);
        }
        double sum = 0.0;
        for (std::size_t c = 0; c < k; ++c) sum += smoothed_probability(cat, c);
        EXPECT_NEAR(sum, 1.0, 1e-12);
        if (excluded) {
            EXPECT_EQ(smoothed_probability(cat, *excluded), 0.0);
        }
    }
}

TEST(Smoothing, ConvergesToRawFrequencies) {
    SmoothedCategorical cat(5);
    const std::uint64_t shares[5] = {100000, 250000, 400000, 50000, 200000};
    for (std::size_t c = 0; c < 5; ++c) cat.add(c, shares[c]);
    ASSERT_EQ(cat.total(), 1000000u);
    for (std::size_t c = 0; c < 5; ++c) {
        EXPECT_NEAR(smoothed_probability(cat, c), static_cast<double>(shares[c]) / 1e6, 1e-5);
    }
}

TEST(Smoothing, RawRatiosWhenDisabled) {
    EXPECT_DOUBLE_EQ(smoothed_ratio(2, 8, 3, Smoothing::none), 0.25);
    EXPECT_DOUBLE_EQ(smoothed_ratio(2, 8, 3, Smoothing::laplace), 3.0 / 11.0);
}
