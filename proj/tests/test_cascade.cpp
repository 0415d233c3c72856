#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace naibx;

namespace {

std::vector<double> one(double v) { return {v}; }

}  // namespace

TEST(PredictSize, OnlyObservedSizeWins) {
    ModelStore store(LabelUniverse::numbered(4), 1);
    for (int i = 0; i < 5; ++i) store.add_example(one(0.0), LabelSet{0, 1, 2});
    EXPECT_EQ(predict_m(store, one(0.0)).first, 3u);
    EXPECT_EQ(predict_m(store, one(100.0)).first, 3u);
}

TEST(PredictSize, FollowsFeatureEvidence) {
    ModelStore store(LabelUniverse::numbered(3), 1);
    for (double v : {-0.2, 0.0, 0.1, 0.3}) store.add_example(one(v), LabelSet{0});
    for (double v : {9.8, 10.0, 10.1, 10.3}) store.add_example(one(v), LabelSet{0, 1});
    const auto [size_hi, scores_hi] = predict_m(store, one(10.0));
    EXPECT_EQ(size_hi, 2u);
    EXPECT_EQ(predict_m(store, one(0.0)).first, 1u);
    const auto expected = fixtures::reference_size_scores(store, one(10.0));
    for (std::size_t m = 0; m < expected.size(); ++m) {
        if (std::isinf(expected[m])) {
            EXPECT_TRUE(std::isinf(scores_hi[m]));
        } else {
            EXPECT_NEAR(scores_hi[m], expected[m], 1e-12);
        }
    }
}

TEST(PredictSize, TieGoesToSmallerSize) {
    ModelStore store(LabelUniverse::numbered(2), 1);
    for (double v : {-1.0, 1.0}) {
        store.add_example(one(v), LabelSet{0});
        store.add_example(one(v), LabelSet{0, 1});
    }
    const auto [m, scores] = predict_m(store, one(0.3));
    EXPECT_EQ(scores[1], scores[2]);
    EXPECT_EQ(m, 1u);
}

TEST(PredictSize, AllDegenerateCompeteOnPrior) {
    ModelStore store(LabelUniverse::numbered(3), 1);
    store.add_example(one(0.0), LabelSet{0});
    store.add_example(one(5.0), LabelSet{0, 1});
    // every size has < 2 examples: prior only, tie between 1 and 2 broken low
    const auto [m, scores] = predict_m(store, one(5.0));
    EXPECT_EQ(m, 1u);
    EXPECT_TRUE(std::isfinite(scores[0]));
}

TEST(PredictSize, MatchesReferenceOnRandomStores) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t labels = 1 + naibx::uniform_below(rng, 8);
        const std::size_t features = 1 + naibx::uniform_below(rng, 6);
        const std::size_t count = 1 + naibx::uniform_below(rng, 80);
        const auto store = fixtures::train(fixtures::random_stream(rng, labels, features, count, labels), labels, features);
        const auto x = fixtures::random_point(rng, features);
        const auto expected = fixtures::reference_size_scores(store, x);
        std::size_t expected_m = fixtures::reference_argmax_first(expected);
        if (std::isinf(expected[expected_m])) {
            const auto& c = store.size_counts();
            expected_m = static_cast<std::size_t>(std::max_element(c.begin(), c.end()) - c.begin());
        }
        EXPECT_EQ(predict_m(store, x).first, expected_m);
    }
}

TEST(PredictLabel, OnlyObservedLabel) {
    ModelStore store(LabelUniverse({"a", "b"}), 1);
    for (double v : {0.1, 0.4, -0.3}) store.add_example(one(v), LabelSet{0});
    const auto pick = predict_yk(store, one(0.0), 1, LabelSet{});
    EXPECT_EQ(pick.label, 0u);
    EXPECT_TRUE(std::isfinite(pick.log_score));
}

TEST(PredictLabel, TwinLabelsRepelEachOther) {
    // a and b each co-occur with c, never with each other
    ModelStore store(LabelUniverse({"a", "b", "c"}), 1);
    const int k = 4;
    for (int i = 0; i < k; ++i) {
        const double v = i % 2 ? 1.0 : -1.0;
        store.add_example(one(v), LabelSet{0, 2});
        store.add_example(one(v), LabelSet{1, 2});
    }
    const std::vector<double> x = one(0.5);
    CascadeScorer scorer(store, x);
    const std::vector<LabelId> chosen = {0};

    auto lik = [&](double mean, double var) { return -0.5 * std::log(2.0 * M_PI * var) - (0.5 - mean) * (0.5 - mean) / (2.0 * var); };
    const double n = 2.0 * k;
    const double b_hand = std::log((k + 1.0) / (n + 3.0)) + lik(0.0, k / (k - 1.0)) + std::log((k + 1.0) / (k + 4.0)) +
                          std::log(1.0 / (k + 2.0));
    const double c_hand = std::log((n + 1.0) / (n + 3.0)) + lik(0.0, n / (n - 1.0)) + std::log((n + 1.0) / (n + 4.0)) +
                          std::log((k + 1.0) / (n + 2.0));
    EXPECT_NEAR(scorer.step_log_score(1, 2, chosen), b_hand, 1e-12);
    EXPECT_NEAR(scorer.step_log_score(2, 2, chosen), c_hand, 1e-12);
    EXPECT_EQ(scorer.best_label(2, chosen).label, 2u);
    EXPECT_EQ(predict_yk(store, x, 2, LabelSet{0}).label, 2u);
}

TEST(PredictLabel, ChosenLabelsAreNeverReturned) {
    ModelStore store(LabelUniverse({"a", "b", "c"}), 1);
    for (double v : {0.0, 0.1, 0.2}) store.add_example(one(v), LabelSet{0});
    for (double v : {5.0, 5.1}) store.add_example(one(v), LabelSet{1, 2});
    const auto pick = predict_yk(store, one(0.1), 2, LabelSet{0});
    EXPECT_NE(pick.label, 0u);
    EXPECT_THROW(predict_yk(store, one(0.1), 1, LabelSet{0}), Error);
    EXPECT_THROW(predict_yk(store, one(0.1), 4, LabelSet{}), Error);
    EXPECT_THROW(predict_yk(store, one(0.1), 2, LabelSet{7}), Error);
}

TEST(PredictLabel, DegenerateLabelsLoseToModelledOnes) {
    ModelStore store(LabelUniverse({"a", "b"}), 1);
    store.add_example(one(0.0), LabelSet{1});  // b seen once
    for (double v : {9.0, 10.0, 11.0}) store.add_example(one(v), LabelSet{0});
    CascadeScorer scorer(store, one(0.0));
    EXPECT_TRUE(std::isinf(scorer.step_log_score(1, 1, {})));
    EXPECT_EQ(scorer.best_label(1, {}).label, 0u);
    // once a is taken, b is the only candidate and competes on its discrete factors
    const std::vector<LabelId> chosen = {0};
    EXPECT_TRUE(std::isfinite(scorer.step_log_score(1, 2, chosen)));
}

TEST(PredictLabel, GreedyStepsMatchLinearScan) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t labels = 2 + naibx::uniform_below(rng, 7);
        const std::size_t features = 1 + naibx::uniform_below(rng, 4);
        const auto store = fixtures::train(fixtures::random_stream(rng, labels, features, 5 + naibx::uniform_below(rng, 100), labels),
                                           labels, features);
        const auto x = fixtures::random_point(rng, features);
        const std::size_t m = 1 + naibx::uniform_below(rng, labels);
        const auto trace = predict_y(store, x, m);
        std::vector<LabelId> chosen;
        for (const auto& step : trace.chosen) {
            const auto scores = fixtures::reference_step_scores(store, x, m, chosen);
            const double best = *std::max_element(scores.begin(), scores.end());
            if (std::isinf(best)) {
                EXPECT_TRUE(std::isinf(step.log_score));
            } else {
                EXPECT_NEAR(step.log_score, best, 1e-9);
                EXPECT_EQ(step.label, fixtures::reference_argmax_first(scores));
            }
            chosen.push_back(step.label);
        }
        EXPECT_EQ(trace.chosen.size(), m);
        EXPECT_EQ(trace.labels().size(), m);
    }
}

TEST(PredictSet, TrueSizeZeroIsEmpty) {
    ModelStore store(LabelUniverse::numbered(3), 1);
    for (double v : {1.0, 2.0}) store.add_example(one(v), LabelSet{0, 1});
    const auto trace = predict_y(store, one(1.5), std::size_t{0});
    EXPECT_EQ(trace.predicted_size, 0u);
    EXPECT_TRUE(trace.chosen.empty());
    EXPECT_TRUE(trace.labels().empty());
    EXPECT_THROW(predict_y(store, one(1.5), std::size_t{4}), Error);
}

TEST(PredictSet, TraceIsAdditiveAndConsistent) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t labels = 2 + naibx::uniform_below(rng, 6);
        const auto store = fixtures::train(fixtures::random_stream(rng, labels, 3, 60, labels), labels, 3);
        const auto x = fixtures::random_point(rng, 3);
        const auto trace = predict_y(store, x);
        double sum = trace.size_log_scores[trace.predicted_size];
        for (const auto& s : trace.chosen) sum += s.log_score;
        const auto order = trace.order();
        const double joint = joint_log_score(store, x, order, trace.predicted_size);
        if (std::isfinite(sum)) {
            EXPECT_NEAR(trace.joint_log_score(), sum, 1e-12);
            EXPECT_NEAR(joint, trace.joint_log_score(), 1e-12);
        }
        EXPECT_EQ(trace.chosen.size(), trace.predicted_size);
        EXPECT_EQ(trace.labels().size(), trace.predicted_size);
        const double mass = std::accumulate(trace.size_normalized.begin(), trace.size_normalized.end(), 0.0);
        EXPECT_NEAR(mass, 1.0, 1e-12);
        for (const auto& s : trace.chosen) {
            EXPECT_GE(s.normalized, 0.0);
            EXPECT_LE(s.normalized, 1.0);
        }
    }
}

TEST(JointScore, EmptyListIsSizeScore) {
    ModelStore store(LabelUniverse::numbered(2), 1);
    for (double v : {1.0, 2.0, 3.0}) store.add_example(one(v), LabelSet{});
    const auto [m, scores] = predict_m(store, one(2.0));
    EXPECT_EQ(m, 0u);
    EXPECT_EQ(joint_log_score(store, one(2.0), std::vector<LabelId>{}, 0), scores[0]);
}

TEST(JointScore, RejectsMalformedOrders) {
    ModelStore store(LabelUniverse::numbered(3), 1);
    for (double v : {1.0, 2.0, 3.0}) store.add_example(one(v), LabelSet{0, 1});
    EXPECT_THROW(joint_log_score(store, one(2.0), std::vector<LabelId>{0, 0}, 2), Error);
    EXPECT_THROW(joint_log_score(store, one(2.0), std::vector<LabelId>{0}, 2), Error);
    EXPECT_THROW(joint_log_score(store, one(2.0), std::vector<LabelId>{0, 5}, 2), Error);
}

TEST(JointScore, DependsOnOrder) {
    // three labels with unequal pair counts: the two orders of {a, b} use
    // different conditionals
    ModelStore store(LabelUniverse({"a", "b", "c"}), 1);
    for (double v : {0.0, 0.2, 0.4, 0.6}) store.add_example(one(v), LabelSet{0, 1});
    for (double v : {0.1, 0.3, 0.5}) store.add_example(one(v), LabelSet{0});
    for (double v : {0.2, 0.7}) store.add_example(one(v), LabelSet{1, 2});
    const std::vector<LabelId> ab = {0, 1};
    const std::vector<LabelId> ba = {1, 0};
    const double s_ab = joint_log_score(store, one(0.3), ab, 2);
    const double s_ba = joint_log_score(store, one(0.3), ba, 2);
    EXPECT_TRUE(std::isfinite(s_ab));
    EXPECT_TRUE(std::isfinite(s_ba));
    EXPECT_GT(std::fabs(s_ab - s_ba), 1e-6);
}

TEST(Cascade, RejectsUntrainedAndBadInput) {
    ModelStore store(LabelUniverse::numbered(2), 2);
    EXPECT_THROW(predict_m(store, std::vector<double>{0.0, 0.0}), Error);
    store.add_example(std::vector<double>{1.0, 1.0}, LabelSet{0});
    EXPECT_THROW(predict_m(store, std::vector<double>{0.0}), Error);
    EXPECT_THROW(predict_y(store, std::vector<double>{0.0, INFINITY}), Error);
}

TEST(Cascade, SingleLabelDataActsAsMulticlassNbc) {
    // every target has size one, so the cascade picks the label with the
    // best prior-times-density score, as a plain multi-class NBC would
    std::mt19937_64 rng(5);
    const std::size_t labels = 4;
    std::vector<fixtures::Example> stream;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const LabelId y = static_cast<LabelId>(i % labels);
        stream.push_back({{3.0 * y + noise(rng), -2.0 * y + noise(rng)}, LabelSet{y}});
    }
    const auto store = fixtures::train(stream, labels, 2);
    for (int q = 0; q < 100; ++q) {
        const auto x = fixtures::random_point(rng, 2, 5.0);
        const auto trace = predict_y(store, x);
        ASSERT_EQ(trace.predicted_size, 1u);
        std::vector<double> nbc(labels);
        for (LabelId y = 0; y < labels; ++y) {
            nbc[y] = std::log((store.label_examples(y) + 1.0) / (store.total_examples() + labels)) +
                     *fixtures::reference_density(*store.given_label().gaussian(), y, store, x);
        }
        EXPECT_EQ(trace.chosen[0].label, fixtures::reference_argmax_first(nbc));
    }
}
