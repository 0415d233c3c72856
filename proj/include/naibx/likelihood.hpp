#pragma once

#include <naibx/error.hpp>
#include <naibx/matrix.hpp>
#include <naibx/stats.hpp>
#include <naibx/textmodel.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

namespace naibx {

enum class LikelihoodKind { gaussian, bernoulli, multinomial };

inline std::string_view likelihood_name(LikelihoodKind kind) {
    switch (kind) {
        case LikelihoodKind::gaussian: return "gaussian";
        case LikelihoodKind::bernoulli: return "bernoulli";
        case LikelihoodKind::multinomial: return "multinomial";
    }
    return "?";
}

inline LikelihoodKind parse_likelihood(std::string_view name) {
    if (name == "gaussian") return LikelihoodKind::gaussian;
    if (name == "bernoulli") return LikelihoodKind::bernoulli;
    if (name == "multinomial") return LikelihoodKind::multinomial;
    fail(ErrorCode::config, "unknown likelihood model '" + std::string(name) + "'");
}

/// Per-condition Gaussian moments for every feature.
class GaussianTable {
public:
    GaussianTable() = default;
    GaussianTable(std::size_t conditions, std::size_t features)
        : moments_(conditions, features), counts_(conditions, 0) {}

    std::size_t conditions() const { return moments_.rows(); }
    std::size_t features() const { return moments_.cols(); }
    std::uint64_t condition_count(std::size_t c) const { return counts_.at(c); }
    const GaussianMoments& moments(std::size_t c, std::size_t i) const { return moments_(c, i); }

    Matrix<GaussianMoments>& table() { return moments_; }
    const Matrix<GaussianMoments>& table() const { return moments_; }
    std::vector<std::uint64_t>& counts() { return counts_; }

    void update(std::size_t c, std::span<const double> x) {
        auto row = moments_.row(c);
        for (std::size_t i = 0; i < row.size(); ++i) row[i].update(x[i]);
        ++counts_[c];
    }

    std::optional<double> log_likelihood(std::size_t c, std::span<const double> x,
                                         std::span<const double> floors, DegeneratePolicy policy) const {
        if (counts_[c] < 2 && policy == DegeneratePolicy::prior_only) return std::nullopt;
        auto row = moments_.row(c);
        double sum = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            sum += *gaussian_log_density(row[i], x[i], floors[i], DegeneratePolicy::floor);
        }
        return sum;
    }

    void merge(const GaussianTable& other) {
        if (other.moments_.rows() != moments_.rows() || other.moments_.cols() != moments_.cols()) {
            fail(ErrorCode::mismatch, "gaussian tables differ in shape");
        }
        for (std::size_t k = 0; k < moments_.size(); ++k) {
            moments_.data()[k] = merge_moments(moments_.data()[k], other.moments_.data()[k]);
        }
        for (std::size_t c = 0; c < counts_.size(); ++c) counts_[c] += other.counts_[c];
    }

    std::size_t cell_count() const { return 3 * moments_.size() + counts_.size(); }

    friend bool operator==(const GaussianTable&, const GaussianTable&) = default;

private:
    Matrix<GaussianMoments> moments_;
    std::vector<std::uint64_t> counts_;
};

/// P(x | condition) for one family of conditions, either Gaussian over
/// continuous features or a bag-of-words text model.
class FeatureLikelihood {
public:
    FeatureLikelihood() = default;
    FeatureLikelihood(LikelihoodKind kind, std::size_t conditions, std::size_t features) {
        switch (kind) {
            case LikelihoodKind::gaussian: table_ = GaussianTable(conditions, features); break;
            case LikelihoodKind::bernoulli: table_ = TokenCountTable(TextModel::bernoulli, conditions, features); break;
            case LikelihoodKind::multinomial:
                table_ = TokenCountTable(TextModel::multinomial, conditions, features);
                break;
        }
    }

    LikelihoodKind kind() const {
        if (std::holds_alternative<GaussianTable>(table_)) return LikelihoodKind::gaussian;
        return std::get<TokenCountTable>(table_).model() == TextModel::bernoulli ? LikelihoodKind::bernoulli
                                                                                : LikelihoodKind::multinomial;
    }

    /// Throws if `x` cannot be recorded; never modifies the table.
    void validate(std::span<const double> x) const {
        if (const auto* text = std::get_if<TokenCountTable>(&table_)) text->validate_dense(x);
    }

    void update(std::size_t c, std::span<const double> x) {
        std::visit([&](auto& t) {
            if constexpr (std::is_same_v<std::decay_t<decltype(t)>, GaussianTable>) {
                t.update(c, x);
            } else {
                t.update_dense(c, x);
            }
        }, table_);
    }

    /// nullopt means "no density factor for this condition" (degenerate
    /// Gaussian condition under the prior_only policy).
    std::optional<double> log_likelihood(std::size_t c, std::span<const double> x, std::span<const double> floors,
                                         DegeneratePolicy policy) const {
        if (const auto* g = std::get_if<GaussianTable>(&table_)) return g->log_likelihood(c, x, floors, policy);
        return std::get<TokenCountTable>(table_).log_likelihood_dense(c, x);
    }

    void merge(const FeatureLikelihood& other) {
        if (other.table_.index() != table_.index()) fail(ErrorCode::mismatch, "likelihood models differ");
        std::visit([&](auto& t) { t.merge(std::get<std::decay_t<decltype(t)>>(other.table_)); }, table_);
    }

    std::size_t cell_count() const {
        return std::visit([](const auto& t) { return t.cell_count(); }, table_);
    }

    const GaussianTable* gaussian() const { return std::get_if<GaussianTable>(&table_); }
    GaussianTable* gaussian() { return std::get_if<GaussianTable>(&table_); }
    const TokenCountTable* text() const { return std::get_if<TokenCountTable>(&table_); }
    TokenCountTable* text() { return std::get_if<TokenCountTable>(&table_); }

    friend bool operator==(const FeatureLikelihood&, const FeatureLikelihood&) = default;

private:
    std::variant<GaussianTable, TokenCountTable> table_;
};

}  // namespace naibx
