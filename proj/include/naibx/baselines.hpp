#pragma once

#include <naibx/cascade.hpp>
#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/likelihood.hpp>
#include <naibx/matrix.hpp>
#include <naibx/stats.hpp>

#include <array>
#include <numeric>
#include <span>
#include <vector>

namespace naibx {

/// Two-class Naive Bayes deciding whether one label is present. Besides the
/// feature vector it may consume extra 0/1 inputs ("bits"), modeled as
/// smoothed Bernoulli variables.
class BinaryNbc {
public:
    BinaryNbc(std::size_t features, std::size_t bits, LikelihoodKind kind)
        : likelihood_(kind, 2, features), bit_counts_(2, bits, 0) {}

    std::size_t bit_count() const { return bit_counts_.cols(); }
    std::uint64_t class_count(bool present) const { return counts_[present ? 1 : 0]; }

    void validate(std::span<const double> x) const { likelihood_.validate(x); }

    void add(std::span<const double> x, std::span<const char> bits, bool present) {
        const std::size_t c = present ? 1 : 0;
        ++counts_[c];
        likelihood_.update(c, x);
        for (std::size_t b = 0; b < bits.size(); ++b) bit_counts_(c, b) += bits[b] ? 1 : 0;
    }

    /// {absent, present} log-scores.
    std::array<double, 2> log_scores(std::span<const double> x, std::span<const char> bits,
                                     std::span<const double> floors, PredictOptions options) const {
        const std::uint64_t total = counts_[0] + counts_[1];
        std::array<std::optional<double>, 2> lik;
        for (std::size_t c = 0; c < 2; ++c) lik[c] = likelihood_.log_likelihood(c, x, floors, options.policy);
        const bool any_density = lik[0].has_value() || lik[1].has_value();

        std::array<double, 2> out{};
        for (std::size_t c = 0; c < 2; ++c) {
            double score = smoothed_log_ratio(counts_[c], total, 2, options.smoothing);
            if (any_density) score = lik[c] ? score + *lik[c] : kNegInf;
            for (std::size_t b = 0; b < bits.size(); ++b) {
                const std::uint64_t ones = bit_counts_(c, b);
                const std::uint64_t hits = bits[b] ? ones : counts_[c] - ones;
                score += smoothed_log_ratio(hits, counts_[c], 2, options.smoothing);
            }
            out[c] = score;
        }
        return out;
    }

    bool decide(std::span<const double> x, std::span<const char> bits, std::span<const double> floors,
                PredictOptions options) const {
        const auto s = log_scores(x, bits, floors, options);
        return s[1] > s[0];
    }

private:
    std::array<std::uint64_t, 2> counts_{0, 0};
    FeatureLikelihood likelihood_;
    Matrix<std::uint64_t> bit_counts_;
};

namespace detail {

struct FloorTracker {
    std::vector<GaussianMoments> overall;

    void update(std::span<const double> x, LikelihoodKind kind) {
        if (kind != LikelihoodKind::gaussian) return;
        if (overall.empty()) overall.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) overall[i].update(x[i]);
    }

    std::vector<double> floors() const {
        std::vector<double> out;
        for (const auto& g : overall) out.push_back(variance_floor(g));
        return out;
    }
};

inline void check_training_input(std::span<const double> x, std::size_t features, const LabelSet& target,
                                 std::size_t labels) {
    if (x.size() != features) fail(ErrorCode::input, "feature dimension mismatch");
    if (!target.within(labels)) fail(ErrorCode::input, "target contains a label outside the universe");
    require_finite(x);
}

}  // namespace detail

/// One independent binary NBC per label.
class BinaryRelevance {
public:
    BinaryRelevance(std::size_t labels, std::size_t features, LikelihoodKind kind = LikelihoodKind::gaussian)
        : features_(features), kind_(kind) {
        if (labels == 0 || features == 0) fail(ErrorCode::input, "empty label universe or feature space");
        bank_.reserve(labels);
        for (std::size_t y = 0; y < labels; ++y) bank_.emplace_back(features, 0, kind);
    }

    void add_example(std::span<const double> x, const LabelSet& target) {
        detail::check_training_input(x, features_, target, bank_.size());
        bank_.front().validate(x);
        for (LabelId y = 0; y < bank_.size(); ++y) bank_[y].add(x, {}, target.contains(y));
        floors_.update(x, kind_);
        ++total_;
    }

    void add_example(const Instance& instance) {
        if (!instance.target) fail(ErrorCode::input, "training instance has no target");
        add_example(densify(instance.features), *instance.target);
    }

    LabelSet predict(std::span<const double> x, PredictOptions options = {}) const {
        if (total_ == 0) fail(ErrorCode::untrained, "binary relevance bank has not seen any example");
        if (x.size() != features_) fail(ErrorCode::input, "feature dimension mismatch");
        const auto floors = floors_.floors();
        LabelSet out;
        for (LabelId y = 0; y < bank_.size(); ++y) {
            if (bank_[y].decide(x, {}, floors, options)) out.insert(y);
        }
        return out;
    }

    const BinaryNbc& classifier(LabelId y) const { return bank_.at(y); }
    std::uint64_t total_examples() const { return total_; }

private:
    std::size_t features_;
    LikelihoodKind kind_;
    std::vector<BinaryNbc> bank_;
    detail::FloorTracker floors_;
    std::uint64_t total_ = 0;
};

/// Classifier chain: position k decides label order[k] from x plus the
/// decisions for order[0..k). Training feeds the true memberships.
class ClassifierChain {
public:
    ClassifierChain(std::vector<LabelId> order, std::size_t features, LikelihoodKind kind = LikelihoodKind::gaussian)
        : order_(std::move(order)), features_(features), kind_(kind) {
        if (order_.empty() || features == 0) fail(ErrorCode::input, "empty label universe or feature space");
        std::vector<char> seen(order_.size(), 0);
        for (LabelId y : order_) {
            if (y >= order_.size() || seen[y]) fail(ErrorCode::input, "chain order is not a permutation");
            seen[y] = 1;
        }
        chain_.reserve(order_.size());
        for (std::size_t k = 0; k < order_.size(); ++k) chain_.emplace_back(features, k, kind);
    }

    /// Chain in universe order.
    static ClassifierChain in_universe_order(std::size_t labels, std::size_t features,
                                             LikelihoodKind kind = LikelihoodKind::gaussian) {
        std::vector<LabelId> order(labels);
        std::iota(order.begin(), order.end(), LabelId{0});
        return ClassifierChain(std::move(order), features, kind);
    }

    const std::vector<LabelId>& order() const { return order_; }

    void add_example(std::span<const double> x, const LabelSet& target) {
        detail::check_training_input(x, features_, target, order_.size());
        chain_.front().validate(x);
        std::vector<char> bits;
        bits.reserve(order_.size());
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const bool present = target.contains(order_[k]);
            chain_[k].add(x, bits, present);
            bits.push_back(present ? 1 : 0);
        }
        floors_.update(x, kind_);
        ++total_;
    }

    void add_example(const Instance& instance) {
        if (!instance.target) fail(ErrorCode::input, "training instance has no target");
        add_example(densify(instance.features), *instance.target);
    }

    LabelSet predict(std::span<const double> x, PredictOptions options = {}) const {
        if (total_ == 0) fail(ErrorCode::untrained, "classifier chain has not seen any example");
        if (x.size() != features_) fail(ErrorCode::input, "feature dimension mismatch");
        const auto floors = floors_.floors();
        std::vector<char> bits;
        LabelSet out;
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const bool present = chain_[k].decide(x, bits, floors, options);
            bits.push_back(present ? 1 : 0);
            if (present) out.insert(order_[k]);
        }
        return out;
    }

    const BinaryNbc& position(std::size_t k) const { return chain_.at(k); }

private:
    std::vector<LabelId> order_;
    std::size_t features_;
    LikelihoodKind kind_;
    std::vector<BinaryNbc> chain_;
    detail::FloorTracker floors_;
    std::uint64_t total_ = 0;
};

}  // namespace naibx
