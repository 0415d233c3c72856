#pragma once

#include <naibx/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace naibx {

/// Index of a label inside its LabelUniverse.
using LabelId = std::uint32_t;

/// The fixed, ordered set of admissible labels.
class LabelUniverse {
public:
    LabelUniverse() = default;
    explicit LabelUniverse(std::vector<std::string> names) : names_(std::move(names)) {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (!index_.emplace(names_[i], static_cast<LabelId>(i)).second) {
                fail(ErrorCode::input, "duplicate label name '" + names_[i] + "'");
            }
        }
    }

    /// Universe with labels named "0".."size-1".
    static LabelUniverse numbered(std::size_t size) {
        std::vector<std::string> names;
        names.reserve(size);
        for (std::size_t i = 0; i < size; ++i) names.push_back(std::to_string(i));
        return LabelUniverse(std::move(names));
    }

    std::size_t size() const { return names_.size(); }
    bool empty() const { return names_.empty(); }
    const std::string& name(LabelId id) const { return names_.at(id); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<LabelId> find(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    LabelId id(const std::string& name) const {
        auto found = find(name);
        if (!found) fail(ErrorCode::input, "unknown label '" + name + "'");
        return *found;
    }

    friend bool operator==(const LabelUniverse& a, const LabelUniverse& b) { return a.names_ == b.names_; }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, LabelId> index_;
};

/// A subset of a label universe, kept sorted by id.
class LabelSet {
public:
    LabelSet() = default;
    LabelSet(std::initializer_list<LabelId> ids) : LabelSet(std::vector<LabelId>(ids)) {}
    /// Rejects duplicates rather than silently collapsing them.
    explicit LabelSet(std::vector<LabelId> ids) : members_(std::move(ids)) {
        std::sort(members_.begin(), members_.end());
        if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
            fail(ErrorCode::input, "duplicate label in label set");
        }
    }

    bool contains(LabelId id) const { return std::binary_search(members_.begin(), members_.end(), id); }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    const std::vector<LabelId>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    void insert(LabelId id) {
        auto it = std::lower_bound(members_.begin(), members_.end(), id);
        if (it != members_.end() && *it == id) fail(ErrorCode::input, "duplicate label in label set");
        members_.insert(it, id);
    }

    /// True when every member is a valid id of a universe of the given size.
    bool within(std::size_t universe_size) const {
        return members_.empty() || members_.back() < universe_size;
    }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;
    friend auto operator<=>(const LabelSet&, const LabelSet&) = default;

private:
    std::vector<LabelId> members_;
};

inline std::size_t intersection_size(const LabelSet& a, const LabelSet& b) {
    std::size_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++count;
            ++i;
            ++j;
        }
    }
    return count;
}

struct SparseEntry {
    std::uint32_t index;
    double value;
    friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Index/value pairs; unlisted indices are zero.
struct SparseFeatures {
    std::uint32_t dimension = 0;
    std::vector<SparseEntry> entries;
    friend bool operator==(const SparseFeatures&, const SparseFeatures&) = default;
};

using Features = std::variant<std::vector<double>, SparseFeatures>;

inline std::size_t dimension(const Features& features) {
    if (const auto* dense = std::get_if<std::vector<double>>(&features)) return dense->size();
    return std::get<SparseFeatures>(features).dimension;
}

inline std::vector<double> densify(const Features& features) {
    if (const auto* dense = std::get_if<std::vector<double>>(&features)) return *dense;
    const auto& sparse = std::get<SparseFeatures>(features);
    std::vector<double> out(sparse.dimension, 0.0);
    for (const auto& e : sparse.entries) {
        if (e.index >= sparse.dimension) fail(ErrorCode::input, "sparse index beyond dimension");
        out[e.index] = e.value;
    }
    return out;
}

inline void require_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) fail(ErrorCode::input, "non-finite feature value");
    }
}

/// One observation. `target` is absent for unlabeled prediction inputs.
struct Instance {
    Features features;
    std::optional<LabelSet> target;
};

}  // namespace naibx
