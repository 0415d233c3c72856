#pragma once

#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/random.hpp>

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

namespace naibx {

/// Aggregate evaluation of one run. Scores are in [0, 1]; cardinalities in
/// [0, |Y|].
struct MetricsReport {
    std::size_t instances = 0;
    double lcard_true = 0.0;
    double lcard_pred = 0.0;
    double hamming_score = 0.0;
    double zero_one_score = 0.0;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

/// Stated in every report: how empty truth/prediction sets are scored.
inline constexpr const char* kEmptySetConvention =
    "empty-set convention: Acc=Pre=Rec=1 when truth and prediction are both empty; "
    "Pre=0 for an empty prediction with nonempty truth; Rec=0 for an empty truth with nonempty prediction";

namespace detail {

inline void check_pairs(const std::vector<LabelSet>& truths, const std::vector<LabelSet>& preds,
                        std::size_t universe_size) {
    if (truths.size() != preds.size()) fail(ErrorCode::input, "truth and prediction lists differ in length");
    if (truths.empty()) fail(ErrorCode::input, "cannot evaluate an empty list");
    if (universe_size == 0) fail(ErrorCode::input, "label universe must not be empty");
    for (std::size_t i = 0; i < truths.size(); ++i) {
        if (!truths[i].within(universe_size) || !preds[i].within(universe_size)) {
            fail(ErrorCode::input, "label set outside the universe");
        }
    }
}

inline double ratio_or(std::size_t num, std::size_t den, double when_empty) {
    return den == 0 ? when_empty : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline MetricsReport evaluate(const std::vector<LabelSet>& truths, const std::vector<LabelSet>& preds,
                              std::size_t universe_size) {
    detail::check_pairs(truths, preds, universe_size);
    MetricsReport r;
    r.instances = truths.size();
    const double labels = static_cast<double>(universe_size);
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const LabelSet& t = truths[i];
        const LabelSet& p = preds[i];
        const std::size_t inter = intersection_size(t, p);
        const std::size_t uni = t.size() + p.size() - inter;
        const std::size_t mismatched = uni - inter;

        r.lcard_true += static_cast<double>(t.size());
        r.lcard_pred += static_cast<double>(p.size());
        r.hamming_score += (labels - static_cast<double>(mismatched)) / labels;
        r.zero_one_score += t == p ? 1.0 : 0.0;
        r.accuracy += detail::ratio_or(inter, uni, 1.0);
        const bool both_empty = t.empty() && p.empty();
        r.precision += detail::ratio_or(inter, p.size(), both_empty ? 1.0 : 0.0);
        r.recall += detail::ratio_or(inter, t.size(), both_empty ? 1.0 : 0.0);
    }
    const double n = static_cast<double>(truths.size());
    r.lcard_true /= n;
    r.lcard_pred /= n;
    r.hamming_score /= n;
    r.zero_one_score /= n;
    r.accuracy /= n;
    r.precision /= n;
    r.recall /= n;
    return r;
}

inline MetricsReport evaluate(const std::vector<LabelSet>& truths, const std::vector<LabelSet>& preds,
                              const LabelUniverse& universe) {
    return evaluate(truths, preds, universe.size());
}

/// Fraction of label slots predicted wrongly; complement of the Hamming score.
inline double hamming_loss(const std::vector<LabelSet>& truths, const std::vector<LabelSet>& preds,
                           std::size_t universe_size) {
    detail::check_pairs(truths, preds, universe_size);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        for (LabelId y = 0; y < universe_size; ++y) wrong += truths[i].contains(y) != preds[i].contains(y) ? 1 : 0;
    }
    return static_cast<double>(wrong) / (static_cast<double>(truths.size()) * static_cast<double>(universe_size));
}

inline double label_cardinality(const std::vector<LabelSet>& sets) {
    if (sets.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : sets) total += static_cast<double>(s.size());
    return total / static_cast<double>(sets.size());
}

/// Field-wise mean of several reports (cross-validation folds).
inline MetricsReport mean_report(const std::vector<MetricsReport>& reports) {
    if (reports.empty()) fail(ErrorCode::input, "no reports to average");
    MetricsReport m;
    for (const auto& r : reports) {
        m.instances += r.instances;
        m.lcard_true += r.lcard_true;
        m.lcard_pred += r.lcard_pred;
        m.hamming_score += r.hamming_score;
        m.zero_one_score += r.zero_one_score;
        m.accuracy += r.accuracy;
        m.precision += r.precision;
        m.recall += r.recall;
        m.train_seconds += r.train_seconds;
        m.predict_seconds += r.predict_seconds;
    }
    const double k = static_cast<double>(reports.size());
    m.lcard_true /= k;
    m.lcard_pred /= k;
    m.hamming_score /= k;
    m.zero_one_score /= k;
    m.accuracy /= k;
    m.precision /= k;
    m.recall /= k;
    m.train_seconds /= k;
    m.predict_seconds /= k;
    return m;
}

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// k disjoint test folds of near-equal size covering every index once.
/// Indices inside each returned list are sorted.
inline std::vector<Fold> kfold_indices(std::size_t n_examples, std::size_t k, std::uint64_t seed) {
    if (k < 2) fail(ErrorCode::input, "k-fold needs k >= 2");
    if (k > n_examples) fail(ErrorCode::input, "more folds than examples");
    const auto perm = shuffled_indices(n_examples, seed);
    std::vector<std::size_t> fold_of(n_examples);
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = n_examples / k + (f < n_examples % k ? 1 : 0);
        for (std::size_t j = 0; j < size; ++j) fold_of[perm[pos++]] = f;
    }
    std::vector<Fold> folds(k);
    for (std::size_t i = 0; i < n_examples; ++i) {
        for (std::size_t f = 0; f < k; ++f) (f == fold_of[i] ? folds[f].test : folds[f].train).push_back(i);
    }
    return folds;
}

// ---- report text ----

struct ReportRow {
    std::string dataset;
    std::string algo;
    std::string fold;  // fold number, "mean", or "split"
    MetricsReport metrics;
};

inline std::string format_fixed(double v, int digits = 3) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

/// Comma-separated report; timing columns are omitted when `with_timings`
/// is false so repeated runs produce identical bytes.
inline std::string report_csv(const std::vector<ReportRow>& rows, bool with_timings = true) {
    std::ostringstream os;
    os << "# " << kEmptySetConvention << '\n';
    os << "dataset,algo,fold,n,lcard,lcard_pred,hamming_score,zero_one_score,accuracy,precision,recall";
    if (with_timings) os << ",train_seconds,predict_seconds";
    os << '\n';
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        os << r.dataset << ',' << r.algo << ',' << r.fold << ',' << m.instances << ',' << format_fixed(m.lcard_true)
           << ',' << format_fixed(m.lcard_pred) << ',' << format_fixed(m.hamming_score, 4) << ','
           << format_fixed(m.zero_one_score, 4) << ',' << format_fixed(m.accuracy, 4) << ','
           << format_fixed(m.precision, 4) << ',' << format_fixed(m.recall, 4);
        if (with_timings) os << ',' << format_fixed(m.train_seconds, 4) << ',' << format_fixed(m.predict_seconds, 4);
        os << '\n';
    }
    return os.str();
}

/// Fixed-width table in the layout of the usual multi-label result tables.
inline std::string report_table(const std::vector<ReportRow>& rows, bool with_timings = true) {
    std::vector<std::string> header = {"Data", "Algo", "Fold", "LCard", "LCard^", "H_s", "Z_s", "Acc", "Pre", "Rec"};
    if (with_timings) {
        header.push_back("T_train[s]");
        header.push_back("T_pred[s]");
    }
    std::vector<std::vector<std::string>> cells;
    cells.push_back(header);
    for (const auto& r : rows) {
        const auto& m = r.metrics;
        std::vector<std::string> line = {r.dataset,
                                         r.algo,
                                         r.fold,
                                         format_fixed(m.lcard_true),
                                         format_fixed(m.lcard_pred),
                                         format_fixed(m.hamming_score),
                                         format_fixed(m.zero_one_score),
                                         format_fixed(m.accuracy),
                                         format_fixed(m.precision),
                                         format_fixed(m.recall)};
        if (with_timings) {
            line.push_back(format_fixed(m.train_seconds, 6));
            line.push_back(format_fixed(m.predict_seconds, 6));
        }
        cells.push_back(std::move(line));
    }
    std::vector<std::size_t> width(header.size(), 0);
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
    }
    std::ostringstream os;
    os << "# " << kEmptySetConvention << '\n';
    for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
            if (c > 0) os << "  ";
            if (c < 3) {
                os << std::left << std::setw(static_cast<int>(width[c])) << line[c];
            } else {
                os << std::right << std::setw(static_cast<int>(width[c])) << line[c];
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace naibx
