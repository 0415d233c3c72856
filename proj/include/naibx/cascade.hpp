#pragma once

#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/model.hpp>
#include <naibx/stats.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace naibx {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct PredictOptions {
    Smoothing smoothing = Smoothing::laplace;
    DegeneratePolicy policy = DegeneratePolicy::prior_only;
};

struct ScoredLabel {
    LabelId label = 0;
    double log_score = kNegInf;
    /// Softmax of log_score over the candidates of its step; reporting only.
    double normalized = 0.0;
};

/// Everything one cascade run produced: the chosen size, the labels in the
/// order they were picked, and the per-size log-scores.
struct PredictionTrace {
    std::size_t predicted_size = 0;
    std::vector<ScoredLabel> chosen;
    std::vector<double> size_log_scores;
    std::vector<double> size_normalized;

    LabelSet labels() const {
        LabelSet out;
        for (const auto& c : chosen) out.insert(c.label);
        return out;
    }

    std::vector<LabelId> order() const {
        std::vector<LabelId> out;
        for (const auto& c : chosen) out.push_back(c.label);
        return out;
    }

    double joint_log_score() const {
        double total = size_log_scores.at(predicted_size);
        for (const auto& c : chosen) total += c.log_score;
        return total;
    }
};

inline double log_sum_exp(std::span<const double> values) {
    double peak = kNegInf;
    for (double v : values) peak = std::max(peak, v);
    if (peak == kNegInf) return kNegInf;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - peak);
    return peak + std::log(sum);
}

/// Per-query scoring state. Feature likelihoods are evaluated once per label
/// and per size; every cascade step then only combines cached terms with the
/// discrete tables.
///
/// A condition seen fewer than twice has no density (prior_only policy). It
/// competes on its discrete factors alone when every competitor is in the
/// same situation, and is ruled out (-inf) otherwise.
class CascadeScorer {
public:
    CascadeScorer(const ModelStore& store, std::span<const double> x, PredictOptions options = {})
        : store_(store), options_(options) {
        if (store.total_examples() == 0) fail(ErrorCode::untrained, "model has not seen any example");
        if (x.size() != store.feature_count()) fail(ErrorCode::input, "feature dimension mismatch");
        require_finite(x);

        const std::size_t labels = store.label_count();
        const std::uint64_t n_total = store.total_examples();
        const std::vector<double> floors = store.variance_floors();

        std::vector<double> size_prior(labels + 1);
        std::vector<std::optional<double>> size_lik(labels + 1);
        bool any_size_density = false;
        for (std::size_t m = 0; m <= labels; ++m) {
            size_prior[m] = smoothed_log_ratio(store.size_examples(m), n_total, labels + 1, options.smoothing);
            size_lik[m] = store.given_size().log_likelihood(m, x, floors, options.policy);
            any_size_density = any_size_density || size_lik[m].has_value();
        }
        size_scores_.resize(labels + 1);
        for (std::size_t m = 0; m <= labels; ++m) {
            if (!any_size_density) {
                size_scores_[m] = size_prior[m];
            } else {
                size_scores_[m] = size_lik[m] ? size_prior[m] + *size_lik[m] : kNegInf;
            }
        }

        label_prior_.resize(labels);
        label_lik_.resize(labels);
        for (LabelId y = 0; y < labels; ++y) {
            label_prior_[y] = smoothed_log_ratio(store.label_examples(y), n_total, labels, options.smoothing);
            label_lik_[y] = store.given_label().log_likelihood(y, x, floors, options.policy);
            if (label_lik_[y]) ++with_density_;
        }
    }

    const ModelStore& store() const { return store_; }
    const PredictOptions& options() const { return options_; }
    const std::vector<double>& size_log_scores() const { return size_scores_; }

    /// Most probable subset size; ties go to the smaller size.
    std::size_t best_size() const {
        std::size_t best = 0;
        for (std::size_t m = 1; m < size_scores_.size(); ++m) {
            if (size_scores_[m] > size_scores_[best]) best = m;
        }
        if (size_scores_[best] == kNegInf) {
            // Nothing finite: fall back to the smoothed size prior.
            const auto& counts = store_.size_counts();
            best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        }
        return best;
    }

    /// Log-score of picking `candidate` next, given the target size and the
    /// labels already chosen. `candidate` must not be in `chosen`.
    double step_log_score(LabelId candidate, std::size_t m, std::span<const LabelId> chosen) const {
        const std::size_t labels = store_.label_count();
        std::size_t chosen_with_density = 0;
        for (LabelId c : chosen) chosen_with_density += label_lik_[c] ? 1 : 0;
        const bool density_among_candidates = with_density_ > chosen_with_density;

        double score = label_prior_[candidate];
        if (density_among_candidates) {
            if (!label_lik_[candidate]) return kNegInf;
            score += *label_lik_[candidate];
        }
        const std::uint64_t n_y = store_.label_examples(candidate);
        score += smoothed_log_ratio(store_.size_given_label(candidate, m), n_y, labels + 1, options_.smoothing);
        for (LabelId c : chosen) {
            score += smoothed_log_ratio(store_.pair_examples(candidate, c), n_y, labels - 1, options_.smoothing);
        }
        return score;
    }

    /// Scores of every label for one step; -inf for labels already chosen.
    std::vector<double> step_log_scores(std::size_t m, std::span<const LabelId> chosen) const {
        std::vector<double> scores(store_.label_count(), kNegInf);
        for (LabelId y = 0; y < scores.size(); ++y) {
            if (std::find(chosen.begin(), chosen.end(), y) == chosen.end()) scores[y] = step_log_score(y, m, chosen);
        }
        return scores;
    }

    /// Argmax of one cascade step, ties broken by universe order.
    ScoredLabel best_label(std::size_t m, std::span<const LabelId> chosen) const {
        if (chosen.size() >= m) fail(ErrorCode::input, "already chose as many labels as the target size");
        if (m > store_.label_count()) fail(ErrorCode::input, "target size exceeds the label universe");
        const std::vector<double> scores = step_log_scores(m, chosen);
        std::optional<LabelId> best;
        for (LabelId y = 0; y < scores.size(); ++y) {
            if (scores[y] == kNegInf) continue;
            if (!best || scores[y] > scores[*best]) best = y;
        }
        if (!best) {
            // Every candidate is -inf: take the most frequent remaining label.
            for (LabelId y = 0; y < scores.size(); ++y) {
                if (std::find(chosen.begin(), chosen.end(), y) != chosen.end()) continue;
                if (!best || store_.label_examples(y) > store_.label_examples(*best)) best = y;
            }
        }
        const double total = log_sum_exp(scores);
        const double normalized = total == kNegInf ? 0.0 : std::exp(scores[*best] - total);
        return {*best, scores[*best], normalized};
    }

private:
    const ModelStore& store_;
    PredictOptions options_;
    std::vector<double> size_scores_;
    std::vector<double> label_prior_;
    std::vector<std::optional<double>> label_lik_;
    std::size_t with_density_ = 0;
};

/// Most probable subset size and the log-score of every size 0..|Y|.
inline std::pair<std::size_t, std::vector<double>> predict_m(const ModelStore& store, std::span<const double> x,
                                                             PredictOptions options = {}) {
    CascadeScorer scorer(store, x, options);
    return {scorer.best_size(), scorer.size_log_scores()};
}

/// One cascade step: the best label not yet in `chosen` for a subset of size m.
inline ScoredLabel predict_yk(const ModelStore& store, std::span<const double> x, std::size_t m,
                              const LabelSet& chosen, PredictOptions options = {}) {
    if (!chosen.within(store.label_count())) fail(ErrorCode::input, "chosen label outside the universe");
    CascadeScorer scorer(store, x, options);
    return scorer.best_label(m, chosen.members());
}

inline PredictionTrace predict_y(const CascadeScorer& scorer, std::optional<std::size_t> true_m = std::nullopt) {
    const std::size_t labels = scorer.store().label_count();
    if (true_m && *true_m > labels) fail(ErrorCode::input, "true size exceeds the label universe");

    PredictionTrace trace;
    trace.size_log_scores = scorer.size_log_scores();
    const double total = log_sum_exp(trace.size_log_scores);
    trace.size_normalized.reserve(trace.size_log_scores.size());
    for (double s : trace.size_log_scores) trace.size_normalized.push_back(total == kNegInf ? 0.0 : std::exp(s - total));

    trace.predicted_size = true_m ? *true_m : scorer.best_size();
    std::vector<LabelId> chosen;
    chosen.reserve(trace.predicted_size);
    for (std::size_t k = 0; k < trace.predicted_size; ++k) {
        const ScoredLabel next = scorer.best_label(trace.predicted_size, chosen);
        chosen.push_back(next.label);
        trace.chosen.push_back(next);
    }
    return trace;
}

/// Full two-phase prediction. With `true_m` the size phase is bypassed.
inline PredictionTrace predict_y(const ModelStore& store, std::span<const double> x,
                                 std::optional<std::size_t> true_m = std::nullopt, PredictOptions options = {}) {
    CascadeScorer scorer(store, x, options);
    return predict_y(scorer, true_m);
}

/// Cascade factorization for a given label order: size score plus the
/// score of each label given the ones before it.
inline double joint_log_score(const CascadeScorer& scorer, std::span<const LabelId> ordered, std::size_t m) {
    const std::size_t labels = scorer.store().label_count();
    if (ordered.size() != m) fail(ErrorCode::input, "label list length differs from the subset size");
    if (m > labels) fail(ErrorCode::input, "subset size exceeds the label universe");
    for (std::size_t k = 0; k < ordered.size(); ++k) {
        if (ordered[k] >= labels) fail(ErrorCode::input, "label outside the universe");
        if (std::find(ordered.begin(), ordered.begin() + k, ordered[k]) != ordered.begin() + k) {
            fail(ErrorCode::input, "duplicate label in ordered list");
        }
    }
    double total = scorer.size_log_scores()[m];
    for (std::size_t k = 0; k < ordered.size(); ++k) {
        total += scorer.step_log_score(ordered[k], m, ordered.subspan(0, k));
    }
    return total;
}

inline double joint_log_score(const ModelStore& store, std::span<const double> x, std::span<const LabelId> ordered,
                              std::size_t m, PredictOptions options = {}) {
    CascadeScorer scorer(store, x, options);
    return joint_log_score(scorer, ordered, m);
}

}  // namespace naibx
