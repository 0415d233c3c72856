#pragma once

#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/matrix.hpp>
#include <naibx/stats.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace naibx {

enum class TextModel { bernoulli, multinomial };

/// Bag-of-words frequency tables, one row per condition.
///
/// Multinomial rows hold token occurrence counts and the row total is the
/// number of token occurrences. Bernoulli rows hold document frequencies
/// (0/1 per document) and the row total is the number of documents.
/// Probabilities are only formed at scoring time, with add-one smoothing
/// over the vocabulary (multinomial) or over {present, absent} (Bernoulli).
class TokenCountTable {
public:
    TokenCountTable() = default;
    TokenCountTable(TextModel model, std::size_t conditions, std::size_t vocabulary_size)
        : model_(model), counts_(conditions, vocabulary_size, 0), totals_(conditions, 0) {
        if (vocabulary_size == 0) fail(ErrorCode::input, "vocabulary size must be positive");
    }

    TextModel model() const { return model_; }
    std::size_t conditions() const { return counts_.rows(); }
    std::size_t vocabulary_size() const { return counts_.cols(); }

    std::uint64_t count(std::size_t condition, std::size_t token) const { return counts_(condition, token); }
    std::uint64_t condition_total(std::size_t condition) const { return totals_.at(condition); }

    const Matrix<std::uint64_t>& counts() const { return counts_; }
    const std::vector<std::uint64_t>& totals() const { return totals_; }
    Matrix<std::uint64_t>& counts() { return counts_; }
    std::vector<std::uint64_t>& totals() { return totals_; }

    /// Checks a document without modifying the table.
    void validate(std::span<const SparseEntry> tokens) const {
        for (const auto& t : tokens) {
            if (t.index >= vocabulary_size()) fail(ErrorCode::input, "token index out of vocabulary range");
            if (!(t.value >= 1.0) || t.value != std::floor(t.value)) {
                fail(ErrorCode::input, "token counts must be positive integers");
            }
        }
    }

    void validate_dense(std::span<const double> x) const {
        if (x.size() != vocabulary_size()) fail(ErrorCode::input, "document dimension does not match vocabulary");
        for (double v : x) {
            if (!(v >= 0.0) || v != std::floor(v) || !std::isfinite(v)) {
                fail(ErrorCode::input, "bag-of-words values must be non-negative integers");
            }
        }
    }

    void update(std::size_t condition, std::span<const SparseEntry> tokens) {
        check_condition(condition);
        validate(tokens);
        auto row = counts_.row(condition);
        if (model_ == TextModel::multinomial) {
            for (const auto& t : tokens) {
                const auto c = static_cast<std::uint64_t>(t.value);
                row[t.index] += c;
                totals_[condition] += c;
            }
        } else {
            for (const auto& t : tokens) row[t.index] += 1;
            totals_[condition] += 1;
        }
    }

    void update_dense(std::size_t condition, std::span<const double> x) {
        check_condition(condition);
        validate_dense(x);
        auto row = counts_.row(condition);
        if (model_ == TextModel::multinomial) {
            for (std::size_t w = 0; w < x.size(); ++w) {
                const auto c = static_cast<std::uint64_t>(x[w]);
                row[w] += c;
                totals_[condition] += c;
            }
        } else {
            for (std::size_t w = 0; w < x.size(); ++w) row[w] += x[w] != 0.0 ? 1 : 0;
            totals_[condition] += 1;
        }
    }

    /// Multinomial: smoothed P(token | condition). Bernoulli: smoothed
    /// P(token present | condition).
    double token_probability(std::size_t condition, std::size_t token) const {
        check_condition(condition);
        if (model_ == TextModel::multinomial) {
            return smoothed_ratio(counts_(condition, token), totals_[condition], vocabulary_size());
        }
        return smoothed_ratio(counts_(condition, token), totals_[condition], 2);
    }

    double log_likelihood(std::size_t condition, std::span<const SparseEntry> tokens) const {
        check_condition(condition);
        validate(tokens);
        if (model_ == TextModel::multinomial) {
            double sum = 0.0;
            for (const auto& t : tokens) sum += t.value * std::log(token_probability(condition, t.index));
            return sum;
        }
        std::vector<char> present(vocabulary_size(), 0);
        for (const auto& t : tokens) present[t.index] = 1;
        return bernoulli_sum(condition, [&](std::size_t w) { return present[w] != 0; });
    }

    double log_likelihood_dense(std::size_t condition, std::span<const double> x) const {
        check_condition(condition);
        if (x.size() != vocabulary_size()) fail(ErrorCode::input, "document dimension does not match vocabulary");
        if (model_ == TextModel::multinomial) {
            const double denom = std::log(static_cast<double>(totals_[condition] + vocabulary_size()));
            auto row = counts_.row(condition);
            double sum = 0.0;
            for (std::size_t w = 0; w < x.size(); ++w) {
                if (x[w] != 0.0) sum += x[w] * (std::log(static_cast<double>(row[w]) + 1.0) - denom);
            }
            return sum;
        }
        return bernoulli_sum(condition, [&](std::size_t w) { return x[w] != 0.0; });
    }

    void merge(const TokenCountTable& other) {
        if (other.model_ != model_ || other.counts_.rows() != counts_.rows() ||
            other.counts_.cols() != counts_.cols()) {
            fail(ErrorCode::mismatch, "token tables differ in shape or model");
        }
        for (std::size_t i = 0; i < counts_.size(); ++i) counts_.data()[i] += other.counts_.data()[i];
        for (std::size_t c = 0; c < totals_.size(); ++c) totals_[c] += other.totals_[c];
    }

    std::size_t cell_count() const { return counts_.size() + totals_.size(); }

    friend bool operator==(const TokenCountTable&, const TokenCountTable&) = default;

private:
    void check_condition(std::size_t condition) const {
        if (condition >= counts_.rows()) fail(ErrorCode::input, "unknown condition");
    }

    // Every vocabulary word contributes: log P(present) or log P(absent).
    template <class IsPresent>
    double bernoulli_sum(std::size_t condition, IsPresent is_present) const {
        const double docs = static_cast<double>(totals_[condition]);
        const double log_denom = std::log(docs + 2.0);
        auto row = counts_.row(condition);
        double sum = 0.0;
        for (std::size_t w = 0; w < row.size(); ++w) {
            const double df = static_cast<double>(row[w]);
            sum += is_present(w) ? std::log(df + 1.0) - log_denom : std::log(docs - df + 1.0) - log_denom;
        }
        return sum;
    }

    TextModel model_ = TextModel::multinomial;
    Matrix<std::uint64_t> counts_;
    std::vector<std::uint64_t> totals_;
};

inline TokenCountTable bow_update(TokenCountTable table, std::size_t condition,
                                  std::span<const SparseEntry> tokens) {
    table.update(condition, tokens);
    return table;
}

inline double bow_log_likelihood(const TokenCountTable& table, std::size_t condition,
                                 std::span<const SparseEntry> tokens) {
    return table.log_likelihood(condition, tokens);
}

}  // namespace naibx
