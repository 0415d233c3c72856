#pragma once

#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/likelihood.hpp>
#include <naibx/matrix.hpp>
#include <naibx/stats.hpp>

#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace naibx {

/// Sufficient statistics of the cascade: every count and running moment
/// needed to evaluate P(M), P(X_i|M), P(y in Y), P(X_i|y in Y), P(M|y in Y)
/// and P(y' in Y|y in Y).
///
/// Sizes are indexed 0..|Y| and labels by LabelId. Feature likelihoods are
/// kept in two tables: one condition per label and one per subset size.
class ModelStore {
public:
    ModelStore(LabelUniverse universe, std::size_t features, LikelihoodKind kind = LikelihoodKind::gaussian)
        : universe_(std::move(universe)), features_(features), kind_(kind) {
        if (features == 0) fail(ErrorCode::input, "feature dimension must be positive");
        if (universe_.empty()) fail(ErrorCode::input, "label universe must not be empty");
        const std::size_t labels = universe_.size();
        size_counts_.assign(labels + 1, 0);
        label_counts_.assign(labels, 0);
        pair_counts_ = Matrix<std::uint64_t>(labels, labels, 0);
        size_given_label_ = Matrix<std::uint64_t>(labels, labels + 1, 0);
        given_label_ = FeatureLikelihood(kind, labels, features);
        given_size_ = FeatureLikelihood(kind, labels + 1, features);
        if (kind == LikelihoodKind::gaussian) overall_.assign(features, GaussianMoments{});
    }

    const LabelUniverse& universe() const { return universe_; }
    std::size_t label_count() const { return universe_.size(); }
    std::size_t feature_count() const { return features_; }
    LikelihoodKind likelihood() const { return kind_; }

    std::uint64_t total_examples() const { return total_; }
    std::uint64_t size_examples(std::size_t m) const { return size_counts_.at(m); }
    std::uint64_t label_examples(LabelId y) const { return label_counts_.at(y); }
    std::uint64_t pair_examples(LabelId y, LabelId other) const { return pair_counts_(y, other); }
    std::uint64_t size_given_label(LabelId y, std::size_t m) const { return size_given_label_(y, m); }

    const std::vector<std::uint64_t>& size_counts() const { return size_counts_; }
    const std::vector<std::uint64_t>& label_counts() const { return label_counts_; }
    const Matrix<std::uint64_t>& pair_counts() const { return pair_counts_; }
    const Matrix<std::uint64_t>& size_given_label_counts() const { return size_given_label_; }
    const FeatureLikelihood& given_label() const { return given_label_; }
    const FeatureLikelihood& given_size() const { return given_size_; }
    /// Per-feature moments over all examples (Gaussian mode only).
    const std::vector<GaussianMoments>& overall() const { return overall_; }

    /// Per-feature variance floors; empty outside Gaussian mode.
    std::vector<double> variance_floors() const {
        std::vector<double> floors;
        floors.reserve(overall_.size());
        for (const auto& g : overall_) floors.push_back(variance_floor(g));
        return floors;
    }

    void add_example(const Instance& instance) {
        if (!instance.target) fail(ErrorCode::input, "training instance has no target");
        if (dimension(instance.features) != features_) fail(ErrorCode::input, "feature dimension mismatch");
        const std::vector<double> x = densify(instance.features);
        add_example(x, *instance.target);
    }

    /// One learning step. Validates everything before touching any table, so
    /// a rejected example leaves the store unchanged.
    void add_example(std::span<const double> x, const LabelSet& target) {
        if (x.size() != features_) fail(ErrorCode::input, "feature dimension mismatch");
        if (!target.within(universe_.size())) fail(ErrorCode::input, "target contains a label outside the universe");
        require_finite(x);
        given_label_.validate(x);

        const std::size_t m = target.size();
        ++total_;
        ++size_counts_[m];
        given_size_.update(m, x);
        for (std::size_t i = 0; i < overall_.size(); ++i) overall_[i].update(x[i]);

        for (LabelId y : target) {
            ++label_counts_[y];
            ++size_given_label_(y, m);
            given_label_.update(y, x);
            for (LabelId other : target) {
                if (other != y) ++pair_counts_(y, other);
            }
        }
    }

    /// Sums counters and combines moments; equivalent to having trained on
    /// both streams.
    void merge(const ModelStore& other) {
        if (!(other.universe_ == universe_) || other.features_ != features_ || other.kind_ != kind_) {
            fail(ErrorCode::mismatch, "cannot merge models with different configuration");
        }
        total_ += other.total_;
        for (std::size_t m = 0; m < size_counts_.size(); ++m) size_counts_[m] += other.size_counts_[m];
        for (std::size_t y = 0; y < label_counts_.size(); ++y) label_counts_[y] += other.label_counts_[y];
        for (std::size_t k = 0; k < pair_counts_.size(); ++k) pair_counts_.data()[k] += other.pair_counts_.data()[k];
        for (std::size_t k = 0; k < size_given_label_.size(); ++k) {
            size_given_label_.data()[k] += other.size_given_label_.data()[k];
        }
        given_label_.merge(other.given_label_);
        given_size_.merge(other.given_size_);
        for (std::size_t i = 0; i < overall_.size(); ++i) overall_[i] = merge_moments(overall_[i], other.overall_[i]);
    }

    /// Number of stored scalars across all tables (a Gaussian moment counts
    /// as three).
    std::size_t stored_scalar_count() const {
        return 1 + size_counts_.size() + label_counts_.size() + pair_counts_.size() + size_given_label_.size() +
               given_label_.cell_count() + given_size_.cell_count() + 3 * overall_.size();
    }

    /// Throws ErrorCode::model_invariant naming the first violated invariant.
    void check_invariants() const {
        auto violated = [](const std::string& what) { fail(ErrorCode::model_invariant, what); };
        const std::size_t labels = universe_.size();
        if (std::accumulate(size_counts_.begin(), size_counts_.end(), std::uint64_t{0}) != total_) {
            violated("N differs from the sum of per-size counts");
        }
        for (std::size_t y = 0; y < labels; ++y) {
            if (pair_counts_(y, y) != 0) violated("pair-count diagonal is not zero");
            for (std::size_t z = y + 1; z < labels; ++z) {
                if (pair_counts_(y, z) != pair_counts_(z, y)) violated("pair counts are not symmetric");
            }
            auto row = size_given_label_.row(y);
            if (std::accumulate(row.begin(), row.end(), std::uint64_t{0}) != label_counts_[y]) {
                violated("per-label size counts do not sum to the label count");
            }
            if (row[0] != 0) violated("a label is counted under subset size 0");
            for (std::size_t m = 0; m <= labels; ++m) {
                if (row[m] > size_counts_[m]) violated("per-label size count exceeds the size count");
            }
            if (label_counts_[y] > total_) violated("label count exceeds N");
        }
        if (const auto* g = given_label_.gaussian()) check_gaussian(*g, label_counts_, violated);
        if (const auto* g = given_size_.gaussian()) check_gaussian(*g, size_counts_, violated);
        for (const auto& o : overall_) {
            if (o.count != total_ || !(o.m2 >= 0.0)) violated("overall feature moments inconsistent with N");
        }
    }

    friend bool operator==(const ModelStore&, const ModelStore&) = default;

    // Raw table access for the model file reader.
    struct Tables {
        std::uint64_t& total;
        std::vector<std::uint64_t>& size_counts;
        std::vector<std::uint64_t>& label_counts;
        Matrix<std::uint64_t>& pair_counts;
        Matrix<std::uint64_t>& size_given_label;
        FeatureLikelihood& given_label;
        FeatureLikelihood& given_size;
        std::vector<GaussianMoments>& overall;
    };
    Tables tables() {
        return {total_, size_counts_, label_counts_, pair_counts_, size_given_label_, given_label_, given_size_,
                overall_};
    }

private:
    template <class Violated>
    static void check_gaussian(const GaussianTable& table, const std::vector<std::uint64_t>& expected,
                               Violated violated) {
        for (std::size_t c = 0; c < table.conditions(); ++c) {
            if (table.condition_count(c) != expected[c]) violated("feature moment counts disagree with counters");
            for (std::size_t i = 0; i < table.features(); ++i) {
                const auto& g = table.moments(c, i);
                if (g.count != expected[c]) violated("feature moment counts disagree with counters");
                if (!(g.m2 >= 0.0) || !std::isfinite(g.mean)) violated("invalid feature moments");
                if (g.count == 0 && (g.mean != 0.0 || g.m2 != 0.0)) violated("empty moments are not zero");
            }
        }
    }

    LabelUniverse universe_;
    std::size_t features_;
    LikelihoodKind kind_;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> size_counts_;
    std::vector<std::uint64_t> label_counts_;
    Matrix<std::uint64_t> pair_counts_;
    Matrix<std::uint64_t> size_given_label_;
    FeatureLikelihood given_label_;
    FeatureLikelihood given_size_;
    std::vector<GaussianMoments> overall_;
};

inline ModelStore new_model(LabelUniverse universe, std::size_t features,
                            LikelihoodKind kind = LikelihoodKind::gaussian) {
    return ModelStore(std::move(universe), features, kind);
}

inline ModelStore add_example(ModelStore store, const Instance& instance) {
    store.add_example(instance);
    return store;
}

inline ModelStore merge(ModelStore a, const ModelStore& b) {
    a.merge(b);
    return a;
}

}  // namespace naibx
