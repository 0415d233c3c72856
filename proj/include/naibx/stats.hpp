#pragma once

#include <naibx/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace naibx {

/// Running mean and sum of squared deviations (Welford state) for one
/// feature under one condition.
struct GaussianMoments {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void update(double value) {
        ++count;
        const double delta = value - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (value - mean);
    }

    /// m2 / (count - 1); zero when fewer than two observations.
    double sample_variance() const {
        return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1);
    }

    friend bool operator==(const GaussianMoments&, const GaussianMoments&) = default;
};

inline GaussianMoments gaussian_update(GaussianMoments state, double value) {
    if (!std::isfinite(value)) fail(ErrorCode::input, "gaussian_update: non-finite value");
    state.update(value);
    return state;
}

/// Pairwise combination of two Welford states (Chan et al.).
inline GaussianMoments merge_moments(const GaussianMoments& a, const GaussianMoments& b) {
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    GaussianMoments out;
    out.count = a.count + b.count;
    const double na = static_cast<double>(a.count);
    const double nb = static_cast<double>(b.count);
    const double n = static_cast<double>(out.count);
    const double delta = b.mean - a.mean;
    out.mean = a.mean + delta * nb / n;
    out.m2 = a.m2 + b.m2 + delta * delta * na * nb / n;
    return out;
}

/// What to do with a condition observed fewer than twice.
enum class DegeneratePolicy {
    prior_only,  // drop the density factor (caller decides how the class competes)
    floor,       // evaluate under variance = floor around the running mean
};

inline constexpr double kAbsoluteVarianceFloor = 1e-9;
inline constexpr double kRelativeVarianceFloor = 1e-6;

/// Floor applied to every per-condition variance of a feature, derived from
/// that feature's variance over all training examples.
inline double variance_floor(const GaussianMoments& global) {
    return std::max(kAbsoluteVarianceFloor, kRelativeVarianceFloor * global.sample_variance());
}

inline double normal_log_pdf(double value, double mean, double variance) {
    const double d = value - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - d * d / (2.0 * variance);
}

/// Log normal density of `value` under the state's mean and floored sample
/// variance. Returns nullopt (skip the factor) for count < 2 under the
/// prior_only policy.
inline std::optional<double> gaussian_log_density(const GaussianMoments& state, double value,
                                                  double floor,
                                                  DegeneratePolicy policy = DegeneratePolicy::prior_only) {
    if (state.count < 2) {
        if (policy == DegeneratePolicy::prior_only) return std::nullopt;
        return normal_log_pdf(value, state.mean, floor);
    }
    return normal_log_pdf(value, state.mean, std::max(state.sample_variance(), floor));
}

enum class Smoothing { laplace, none };

/// (count + 1) / (total + support) under Laplace smoothing, count / total otherwise.
inline double smoothed_ratio(std::uint64_t count, std::uint64_t total, std::uint64_t support,
                             Smoothing smoothing = Smoothing::laplace) {
    if (smoothing == Smoothing::none) {
        return total == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(total);
    }
    return (static_cast<double>(count) + 1.0) / static_cast<double>(total + support);
}

inline double smoothed_log_ratio(std::uint64_t count, std::uint64_t total, std::uint64_t support,
                                 Smoothing smoothing = Smoothing::laplace) {
    return std::log(smoothed_ratio(count, total, support, smoothing));
}

/// Frequency table over classes 0..K-1 with add-one smoothing. When a class
/// is excluded it has probability zero and the remaining K-1 classes share
/// the mass, i.e. (count + 1) / (total + K - 1).
class SmoothedCategorical {
public:
    explicit SmoothedCategorical(std::size_t support_size,
                                 std::optional<std::size_t> excluded = std::nullopt)
        : counts_(support_size, 0), excluded_(excluded) {
        if (support_size == 0) fail(ErrorCode::input, "categorical support must be positive");
        if (excluded && *excluded >= support_size) fail(ErrorCode::input, "excluded class outside support");
        if (excluded && support_size < 2) fail(ErrorCode::input, "excluding the only class leaves no support");
    }

    void add(std::size_t cls, std::uint64_t times = 1) {
        check(cls);
        if (excluded_ && cls == *excluded_) fail(ErrorCode::input, "cannot observe the excluded class");
        counts_[cls] += times;
        total_ += times;
    }

    double probability(std::size_t cls) const {
        check(cls);
        if (excluded_) {
            if (cls == *excluded_) return 0.0;
            return smoothed_ratio(counts_[cls], total_, counts_.size() - 1);
        }
        return smoothed_ratio(counts_[cls], total_, counts_.size());
    }

    std::uint64_t count(std::size_t cls) const {
        check(cls);
        return counts_[cls];
    }
    std::uint64_t total() const { return total_; }
    std::size_t support_size() const { return counts_.size(); }
    std::optional<std::size_t> excluded() const { return excluded_; }

private:
    void check(std::size_t cls) const {
        if (cls >= counts_.size()) fail(ErrorCode::input, "class outside categorical support");
    }

    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
    std::optional<std::size_t> excluded_;
};

inline double smoothed_probability(const SmoothedCategorical& cat, std::size_t cls) {
    return cat.probability(cls);
}

}  // namespace naibx
