#pragma once

// Brute-force references used to check the cascade. Neither scales; both
// exist for tests and small-universe diagnostics.

#include <naibx/cascade.hpp>
#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/model.hpp>
#include <naibx/stats.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace naibx {

/// Label-powerset Naive Bayes: each observed subset is one class with its
/// own Gaussian moments. Unobserved subsets are unreachable.
class PowersetModel {
public:
    struct ClassStats {
        std::uint64_t count = 0;
        std::vector<GaussianMoments> moments;
    };

    explicit PowersetModel(std::size_t features) : features_(features), overall_(features) {
        if (features == 0) fail(ErrorCode::input, "feature dimension must be positive");
    }

    void add_example(std::span<const double> x, const LabelSet& target) {
        if (x.size() != features_) fail(ErrorCode::input, "feature dimension mismatch");
        require_finite(x);
        auto& stats = classes_[target];
        if (stats.moments.empty()) stats.moments.resize(features_);
        ++stats.count;
        for (std::size_t i = 0; i < features_; ++i) {
            stats.moments[i].update(x[i]);
            overall_[i].update(x[i]);
        }
        ++total_;
    }

    void add_example(const Instance& instance) {
        if (!instance.target) fail(ErrorCode::input, "training instance has no target");
        add_example(densify(instance.features), *instance.target);
    }

    /// Log-score of every observed class, in canonical subset order.
    std::vector<std::pair<LabelSet, double>> class_log_scores(std::span<const double> x,
                                                              PredictOptions options = {}) const {
        if (total_ == 0) fail(ErrorCode::untrained, "powerset model has not seen any example");
        if (x.size() != features_) fail(ErrorCode::input, "feature dimension mismatch");
        std::vector<double> floors;
        for (const auto& g : overall_) floors.push_back(variance_floor(g));

        bool any_density = options.policy == DegeneratePolicy::floor;
        for (const auto& [subset, stats] : classes_) any_density = any_density || stats.count >= 2;

        std::vector<std::pair<LabelSet, double>> out;
        for (const auto& [subset, stats] : classes_) {
            double score = smoothed_log_ratio(stats.count, total_, classes_.size(), options.smoothing);
            if (stats.count < 2 && options.policy == DegeneratePolicy::prior_only) {
                if (any_density) score = kNegInf;
            } else {
                for (std::size_t i = 0; i < features_; ++i) {
                    score += *gaussian_log_density(stats.moments[i], x[i], floors[i], DegeneratePolicy::floor);
                }
            }
            out.emplace_back(subset, score);
        }
        return out;
    }

    LabelSet predict(std::span<const double> x, PredictOptions options = {}) const {
        const auto scores = class_log_scores(x, options);
        std::size_t best = 0;
        for (std::size_t k = 1; k < scores.size(); ++k) {
            if (scores[k].second > scores[best].second) best = k;
        }
        return scores[best].first;
    }

    std::uint64_t total_examples() const { return total_; }
    const std::map<LabelSet, ClassStats>& classes() const { return classes_; }

private:
    std::size_t features_;
    std::uint64_t total_ = 0;
    std::map<LabelSet, ClassStats> classes_;
    std::vector<GaussianMoments> overall_;
};

inline LabelSet powerset_predict(const PowersetModel& model, std::span<const double> x, PredictOptions options = {}) {
    return model.predict(x, options);
}

inline constexpr std::size_t kMaxOracleLabels = 12;

struct SubsetChoice {
    LabelSet labels;
    std::vector<LabelId> order;  // ordering achieving the score
    double log_score = kNegInf;
};

namespace detail {

inline void check_oracle_budget(std::size_t labels) {
    if (labels > kMaxOracleLabels) {
        fail(ErrorCode::budget, "exhaustive subset search refused for " + std::to_string(labels) +
                                    " labels (limit " + std::to_string(kMaxOracleLabels) +
                                    "); the powerset has 2^" + std::to_string(labels) + " members");
    }
}

inline void enumerate_orders(const CascadeScorer& scorer, std::size_t m, std::vector<LabelId>& prefix,
                             std::vector<char>& used, double partial, SubsetChoice& best) {
    if (partial == kNegInf) return;
    if (prefix.size() == m) {
        if (partial > best.log_score) {
            best.order = prefix;
            best.labels = LabelSet(prefix);
            best.log_score = partial;
        }
        return;
    }
    for (LabelId y = 0; y < used.size(); ++y) {
        if (used[y]) continue;
        const double step = scorer.step_log_score(y, m, prefix);
        used[y] = 1;
        prefix.push_back(y);
        enumerate_orders(scorer, m, prefix, used, partial + step, best);
        prefix.pop_back();
        used[y] = 0;
    }
}

}  // namespace detail

/// Exact maximum of the cascade factorization over every subset of size at
/// most `max_size` and every ordering of it. Refuses universes larger than
/// kMaxOracleLabels: the search space grows like sum_k |Y|!/(|Y|-k)!.
inline SubsetChoice best_subset(const CascadeScorer& scorer, std::size_t max_size) {
    const std::size_t labels = scorer.store().label_count();
    detail::check_oracle_budget(labels);
    if (max_size > labels) fail(ErrorCode::input, "max_size exceeds the label universe");

    SubsetChoice best;
    best.log_score = scorer.size_log_scores()[0];
    for (std::size_t m = 1; m <= max_size; ++m) {
        std::vector<LabelId> prefix;
        std::vector<char> used(labels, 0);
        detail::enumerate_orders(scorer, m, prefix, used, scorer.size_log_scores()[m], best);
    }
    return best;
}

inline SubsetChoice best_subset(const ModelStore& store, std::span<const double> x, std::size_t max_size,
                                PredictOptions options = {}) {
    detail::check_oracle_budget(store.label_count());
    CascadeScorer scorer(store, x, options);
    return best_subset(scorer, max_size);
}

}  // namespace naibx
