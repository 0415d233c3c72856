#pragma once

// Shared generators and independent reference computations for the tests.

#include <naibx/naibx.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace naibx::fixtures {

struct Example {
    std::vector<double> x;
    LabelSet y;
};

/// Random multi-label stream: each label has its own feature centre and the
/// target size is drawn uniformly from 0..max_size.
inline std::vector<Example> random_stream(std::mt19937_64& rng, std::size_t labels, std::size_t features,
                                          std::size_t count, std::size_t max_size) {
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> centre(labels, std::vector<double>(features));
    for (auto& c : centre) {
        for (auto& v : c) v = 3.0 * noise(rng);
    }
    std::vector<Example> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t m = static_cast<std::size_t>(uniform_below(rng, max_size + 1));
        std::vector<LabelId> ids(labels);
        for (LabelId y = 0; y < labels; ++y) ids[y] = y;
        for (std::size_t k = 0; k < m; ++k) std::swap(ids[k], ids[k + uniform_below(rng, labels - k)]);
        ids.resize(m);
        Example e{std::vector<double>(features), LabelSet(ids)};
        for (std::size_t f = 0; f < features; ++f) {
            e.x[f] = noise(rng);
            for (LabelId y : e.y) e.x[f] += centre[y][f];
        }
        out.push_back(std::move(e));
    }
    return out;
}

inline ModelStore train(const std::vector<Example>& stream, std::size_t labels, std::size_t features) {
    ModelStore store(LabelUniverse::numbered(labels), features);
    for (const auto& e : stream) store.add_example(e.x, e.y);
    return store;
}

inline std::vector<double> random_point(std::mt19937_64& rng, std::size_t features, double spread = 4.0) {
    std::normal_distribution<double> d(0.0, spread);
    std::vector<double> x(features);
    for (auto& v : x) v = d(rng);
    return x;
}

/// Two-pass mean and sum of squared deviations.
struct BatchMoments {
    double mean = 0.0;
    double m2 = 0.0;
};

inline BatchMoments batch_moments(const std::vector<double>& values) {
    BatchMoments b;
    if (values.empty()) return b;
    for (double v : values) b.mean += v;
    b.mean /= static_cast<double>(values.size());
    for (double v : values) b.m2 += (v - b.mean) * (v - b.mean);
    return b;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-12) {
    return std::fabs(a - b) <= std::max(abs_floor, rel * std::max(std::fabs(a), std::fabs(b)));
}

// ---- scores re-derived from raw counters, without the library's scorer ----

inline double reference_floor(const ModelStore& store, std::size_t feature) {
    const auto& g = store.overall()[feature];
    const double var = g.count < 2 ? 0.0 : g.m2 / static_cast<double>(g.count - 1);
    return std::max(1e-9, 1e-6 * var);
}

/// Sum of per-feature Gaussian log densities, or nullopt when the condition
/// has fewer than two examples.
inline std::optional<double> reference_density(const GaussianTable& table, std::size_t condition,
                                               const ModelStore& store, const std::vector<double>& x) {
    if (table.condition_count(condition) < 2) return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& g = table.moments(condition, i);
        const double var = std::max(g.m2 / static_cast<double>(g.count - 1), reference_floor(store, i));
        sum += -0.5 * std::log(2.0 * M_PI * var) - (x[i] - g.mean) * (x[i] - g.mean) / (2.0 * var);
    }
    return sum;
}

inline double log_ratio(double count, double total) { return std::log(count / total); }

inline std::vector<double> reference_size_scores(const ModelStore& store, const std::vector<double>& x) {
    const double n = static_cast<double>(store.total_examples());
    const std::size_t labels = store.label_count();
    std::vector<double> prior(labels + 1);
    std::vector<std::optional<double>> density(labels + 1);
    bool any = false;
    for (std::size_t m = 0; m <= labels; ++m) {
        prior[m] = log_ratio(static_cast<double>(store.size_counts()[m]) + 1.0, n + static_cast<double>(labels) + 1.0);
        density[m] = reference_density(*store.given_size().gaussian(), m, store, x);
        any = any || density[m].has_value();
    }
    std::vector<double> out(labels + 1);
    for (std::size_t m = 0; m <= labels; ++m) {
        if (!any) {
            out[m] = prior[m];
        } else {
            out[m] = density[m] ? prior[m] + *density[m] : -INFINITY;
        }
    }
    return out;
}

inline std::size_t reference_argmax_first(const std::vector<double>& scores) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < scores.size(); ++k) {
        if (scores[k] > scores[best]) best = k;
    }
    return best;
}

/// Per-candidate step scores; chosen labels get -inf.
inline std::vector<double> reference_step_scores(const ModelStore& store, const std::vector<double>& x,
                                                 std::size_t m, const std::vector<LabelId>& chosen) {
    const double n = static_cast<double>(store.total_examples());
    const std::size_t labels = store.label_count();
    const double big_l = static_cast<double>(labels);
    auto is_chosen = [&](LabelId y) { return std::find(chosen.begin(), chosen.end(), y) != chosen.end(); };
    std::vector<std::optional<double>> density(labels);
    bool any = false;
    for (LabelId y = 0; y < labels; ++y) {
        density[y] = reference_density(*store.given_label().gaussian(), y, store, x);
        if (!is_chosen(y) && density[y]) any = true;
    }
    std::vector<double> out(labels, -INFINITY);
    for (LabelId y = 0; y < labels; ++y) {
        if (is_chosen(y)) continue;
        if (any && !density[y]) continue;
        const double ny = static_cast<double>(store.label_counts()[y]);
        double s = log_ratio(ny + 1.0, n + big_l);
        if (density[y]) s += *density[y];
        s += log_ratio(static_cast<double>(store.size_given_label(y, m)) + 1.0, ny + big_l + 1.0);
        for (LabelId c : chosen) s += log_ratio(static_cast<double>(store.pair_examples(y, c)) + 1.0, ny + big_l - 1.0);
        out[y] = s;
    }
    return out;
}

}  // namespace naibx::fixtures
