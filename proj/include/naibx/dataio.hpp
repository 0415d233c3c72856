#pragma once

#include <naibx/error.hpp>
#include <naibx/labels.hpp>
#include <naibx/random.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace naibx {

enum class FeatureKind { numeric, binary, count };
enum class LabelPosition { prefix, suffix, mixed };

struct DatasetHeader {
    std::string name;
    std::size_t n = 0;
    std::vector<std::string> label_names;
    LabelPosition label_position = LabelPosition::prefix;
    std::vector<FeatureKind> feature_kinds;
};

struct Dataset {
    DatasetHeader header;
    LabelUniverse universe;
    std::vector<std::string> feature_names;
    std::vector<Instance> instances;
    bool sparse = false;

    std::size_t size() const { return instances.size(); }

    bool has_targets() const {
        return std::all_of(instances.begin(), instances.end(), [](const Instance& i) { return i.target.has_value(); });
    }

    std::vector<LabelSet> targets() const {
        std::vector<LabelSet> out;
        out.reserve(instances.size());
        for (const auto& i : instances) {
            if (!i.target) fail(ErrorCode::input, "instance has no target");
            out.push_back(*i.target);
        }
        return out;
    }

    Dataset subset(const std::vector<std::size_t>& indices) const {
        Dataset out;
        out.header = header;
        out.universe = universe;
        out.feature_names = feature_names;
        out.sparse = sparse;
        out.instances.reserve(indices.size());
        for (std::size_t i : indices) out.instances.push_back(instances.at(i));
        return out;
    }
};

/// How label attributes are identified in a dataset file.
struct LabelSpec {
    enum class Kind { meka, xml, names };
    Kind kind = Kind::meka;
    std::string xml_path;
    std::vector<std::string> names;

    /// "meka", "xml:<path>" or "names:a,b,c".
    static LabelSpec parse(std::string_view text) {
        LabelSpec spec;
        if (text == "meka") return spec;
        if (text.starts_with("xml:")) {
            spec.kind = Kind::xml;
            spec.xml_path = std::string(text.substr(4));
            if (spec.xml_path.empty()) fail(ErrorCode::config, "--labels xml: needs a path");
            return spec;
        }
        if (text.starts_with("names:")) {
            spec.kind = Kind::names;
            std::string rest(text.substr(6));
            std::stringstream ss(rest);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (!item.empty()) spec.names.push_back(item);
            }
            if (spec.names.empty()) fail(ErrorCode::config, "--labels names: needs at least one name");
            return spec;
        }
        fail(ErrorCode::config, "label spec must be meka, xml:<path> or names:a,b,...");
    }

    static LabelSpec from_names(std::vector<std::string> names) {
        LabelSpec spec;
        spec.kind = Kind::names;
        spec.names = std::move(names);
        return spec;
    }
};

struct LoadOptions {
    /// Accept files that carry none of the label attributes (prediction
    /// inputs); their instances have no target.
    bool allow_missing_labels = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

inline std::string unquote(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '\'' || s.front() == '"') && s.back() == s.front()) {
        std::string out;
        for (std::size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] == '\\' && i + 2 < s.size()) ++i;
            out.push_back(s[i]);
        }
        return out;
    }
    return std::string(s);
}

inline std::optional<double> parse_double(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto* end = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc() || ptr != end || token.empty()) return std::nullopt;
    return value;
}

/// Splits on `sep` outside single or double quotes.
inline std::vector<std::string_view> split_quoted(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    char quote = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quote) {
            if (c == '\\') {
                ++i;
            } else if (c == quote) {
                quote = 0;
            }
        } else if (c == '\'' || c == '"') {
            quote = c;
        } else if (c == sep) {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    out.push_back(line.substr(start));
    return out;
}

/// Name token at the start of `s` (quoted or up to whitespace); returns the
/// remainder through `rest`.
inline std::string take_name(std::string_view s, std::string_view& rest) {
    s = trim(s);
    if (!s.empty() && (s.front() == '\'' || s.front() == '"')) {
        const char q = s.front();
        for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i] == '\\') {
                ++i;
            } else if (s[i] == q) {
                rest = s.substr(i + 1);
                return unquote(s.substr(0, i + 1));
            }
        }
        rest = {};
        return unquote(s);
    }
    const auto ws = s.find_first_of(" \t");
    if (ws == std::string_view::npos) {
        rest = {};
        return std::string(s);
    }
    rest = s.substr(ws);
    return std::string(s.substr(0, ws));
}

inline bool needs_quotes(std::string_view name) {
    return name.empty() || name.find_first_of(" \t,'\"{}%") != std::string_view::npos;
}

inline std::string quote_name(std::string_view name) {
    if (!needs_quotes(name)) return std::string(name);
    std::string out = "'";
    for (char c : name) {
        if (c == '\'' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('\'');
    return out;
}

/// Shortest decimal that reads back as the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

enum class AttrType { numeric, integer, binary_nominal, other_nominal, unsupported };

struct Attribute {
    std::string name;
    AttrType type = AttrType::numeric;
    std::size_t line = 0;
};

inline AttrType classify_type(std::string_view type) {
    const std::string t = lower(trim(type));
    if (t == "numeric" || t == "real") return AttrType::numeric;
    if (t == "integer") return AttrType::integer;
    if (!t.empty() && t.front() == '{') {
        const auto close = t.find('}');
        std::vector<std::string> values;
        for (auto v : split_quoted(std::string_view(t).substr(1, close == std::string::npos ? t.size() - 1 : close - 1), ',')) {
            values.push_back(unquote(v));
        }
        std::sort(values.begin(), values.end());
        if (values == std::vector<std::string>{"0", "1"}) return AttrType::binary_nominal;
        return AttrType::other_nominal;
    }
    return AttrType::unsupported;
}

inline std::vector<std::string> read_mulan_xml(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open label file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    static const std::regex label_re(R"(<label\s+name\s*=\s*(\"([^\"]*)\"|'([^']*)'))");
    std::vector<std::string> names;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), label_re); it != std::sregex_iterator(); ++it) {
        names.push_back((*it)[2].matched ? (*it)[2].str() : (*it)[3].str());
    }
    if (names.empty()) fail(ErrorCode::parse, "no <label name=...> entries in '" + path + "'");
    return names;
}

/// Parses the MEKA "-C k" option out of a relation name.
inline std::optional<long> meka_label_count(std::string_view relation) {
    static const std::regex c_re(R"((^|\s|:)-C\s+(-?\d+))");
    std::match_results<std::string_view::const_iterator> match;
    if (std::regex_search(relation.begin(), relation.end(), match, c_re)) return std::stol(match[2].str());
    return std::nullopt;
}

inline std::string strip_meka_options(const std::string& relation) {
    const auto colon = relation.find(':');
    if (colon != std::string::npos && meka_label_count(relation)) return std::string(trim(relation.substr(0, colon)));
    return relation;
}

/// Splits attributes into labels and features according to `spec`.
/// Returns for each attribute either the label position or the feature
/// position (labels flagged by is_label).
struct AttributeRoles {
    std::vector<char> is_label;
    std::vector<std::size_t> slot;  // index into labels or features
    std::vector<std::string> label_names;
    bool labels_present = true;
};

inline AttributeRoles assign_roles(const std::vector<Attribute>& attrs, const std::string& relation,
                                   const LabelSpec& spec, const LoadOptions& options) {
    AttributeRoles roles;
    roles.is_label.assign(attrs.size(), 0);
    roles.slot.assign(attrs.size(), 0);

    std::vector<std::string> names;
    if (spec.kind == LabelSpec::Kind::meka) {
        auto k = meka_label_count(relation);
        if (!k) fail(ErrorCode::parse, "relation has no MEKA '-C k' option; pass --labels xml:<file> or names:...");
        const auto count = static_cast<std::size_t>(std::labs(*k));
        if (count == 0 || count >= attrs.size()) fail(ErrorCode::parse, "MEKA -C value out of range");
        for (std::size_t j = 0; j < count; ++j) {
            names.push_back(*k > 0 ? attrs[j].name : attrs[attrs.size() - count + j].name);
        }
    } else {
        names = spec.kind == LabelSpec::Kind::xml ? read_mulan_xml(spec.xml_path) : spec.names;
    }

    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t a = 0; a < attrs.size(); ++a) by_name.emplace(attrs[a].name, a);
    std::size_t found = 0;
    for (const auto& name : names) found += by_name.count(name);
    if (found == 0 && options.allow_missing_labels && spec.kind != LabelSpec::Kind::meka) {
        roles.labels_present = false;
    } else {
        for (const auto& name : names) {
            if (!by_name.count(name)) fail(ErrorCode::parse, "unknown label name '" + name + "'");
        }
    }
    roles.label_names = names;

    if (roles.labels_present) {
        for (std::size_t j = 0; j < names.size(); ++j) {
            const std::size_t a = by_name.at(names[j]);
            if (roles.is_label[a]) fail(ErrorCode::parse, "label '" + names[j] + "' listed twice");
            if (attrs[a].type == AttrType::other_nominal || attrs[a].type == AttrType::unsupported) {
                fail(ErrorCode::parse, "label attribute '" + names[j] + "' is not binary");
            }
            roles.is_label[a] = 1;
            roles.slot[a] = j;
        }
    }
    std::size_t f = 0;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        if (!roles.is_label[a]) roles.slot[a] = f++;
    }
    return roles;
}

inline LabelPosition label_position(const std::vector<char>& is_label) {
    const auto labels = static_cast<std::size_t>(std::count(is_label.begin(), is_label.end(), 1));
    const bool prefix = std::all_of(is_label.begin(), is_label.begin() + static_cast<long>(labels), [](char c) { return c; });
    if (prefix) return LabelPosition::prefix;
    const bool suffix = std::all_of(is_label.end() - static_cast<long>(labels), is_label.end(), [](char c) { return c; });
    return suffix ? LabelPosition::suffix : LabelPosition::mixed;
}

inline bool parse_label_value(std::string_view token, std::size_t line) {
    const std::string v = unquote(token);
    if (v == "1") return true;
    if (v == "0") return false;
    if (auto d = parse_double(v)) {
        if (*d == 1.0) return true;
        if (*d == 0.0) return false;
    }
    throw ParseError(line, "label value '" + v + "' is not 0 or 1");
}

inline double parse_feature_value(std::string_view token, std::size_t line) {
    const std::string v = unquote(token);
    if (v == "?") throw ParseError(line, "missing value '?' is not supported");
    auto d = parse_double(v);
    if (!d) throw ParseError(line, "non-numeric feature token '" + v + "'");
    if (!std::isfinite(*d)) throw ParseError(line, "non-finite feature value '" + v + "'");
    return *d;
}

}  // namespace detail

/// Reads a dense or sparse ARFF file. Label attributes must hold 0/1; every
/// other attribute must be numeric (or nominal {0,1}).
inline Dataset read_arff(std::istream& in, const LabelSpec& spec, const LoadOptions& options = {}) {
    using namespace detail;
    std::string relation;
    std::vector<Attribute> attrs;
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;
    bool saw_relation = false;

    Dataset ds;
    AttributeRoles roles;
    std::size_t n_features = 0;
    bool any_sparse = false;
    bool any_dense = false;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view s = trim(line);
        if (s.empty() || s.front() == '%') continue;

        if (!in_data) {
            if (s.front() != '@') throw ParseError(line_no, "expected a header declaration");
            std::string_view rest;
            const std::string keyword = lower(take_name(s, rest));
            if (keyword == "@relation") {
                relation = unquote(rest);
                saw_relation = true;
            } else if (keyword == "@attribute") {
                std::string_view type;
                Attribute a;
                a.name = take_name(rest, type);
                a.line = line_no;
                if (trim(type).empty()) throw ParseError(line_no, "attribute '" + a.name + "' has no type");
                a.type = classify_type(type);
                attrs.push_back(std::move(a));
            } else if (keyword == "@data") {
                if (!saw_relation) throw ParseError(line_no, "missing @relation before @data");
                if (attrs.empty()) throw ParseError(line_no, "no attributes declared");
                try {
                    roles = assign_roles(attrs, relation, spec, options);
                } catch (const ParseError&) {
                    throw;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::parse) throw;
                    throw ParseError(line_no, e.what());
                }
                for (std::size_t a = 0; a < attrs.size(); ++a) {
                    if (roles.is_label[a]) continue;
                    if (attrs[a].type == AttrType::other_nominal || attrs[a].type == AttrType::unsupported) {
                        throw ParseError(attrs[a].line, "feature attribute '" + attrs[a].name + "' is not numeric");
                    }
                    ds.feature_names.push_back(attrs[a].name);
                    ds.header.feature_kinds.push_back(attrs[a].type == AttrType::binary_nominal ? FeatureKind::binary
                                                      : attrs[a].type == AttrType::integer     ? FeatureKind::count
                                                                                               : FeatureKind::numeric);
                }
                n_features = ds.feature_names.size();
                if (n_features == 0) throw ParseError(line_no, "dataset has no feature attributes");
                ds.universe = LabelUniverse(roles.label_names);
                in_data = true;
            } else {
                throw ParseError(line_no, "unknown declaration '" + keyword + "'");
            }
            continue;
        }

        Instance inst;
        std::vector<LabelId> members;
        if (s.front() == '{') {
            any_sparse = true;
            if (s.back() != '}') throw ParseError(line_no, "unterminated sparse row");
            SparseFeatures sf;
            sf.dimension = static_cast<std::uint32_t>(n_features);
            const std::string_view body = trim(s.substr(1, s.size() - 2));
            if (!body.empty()) {
                long last = -1;
                for (auto item : split_quoted(body, ',')) {
                    item = trim(item);
                    const auto sp = item.find_first_of(" \t");
                    if (sp == std::string_view::npos) throw ParseError(line_no, "sparse entry without value");
                    std::size_t attr = 0;
                    const auto idx_text = item.substr(0, sp);
                    auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), attr);
                    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
                        throw ParseError(line_no, "bad sparse index '" + std::string(idx_text) + "'");
                    }
                    if (attr >= attrs.size()) {
                        throw ParseError(line_no, "sparse index " + std::to_string(attr) + " exceeds attribute count");
                    }
                    if (static_cast<long>(attr) <= last) throw ParseError(line_no, "sparse indices not increasing");
                    last = static_cast<long>(attr);
                    const auto value = item.substr(sp + 1);
                    if (roles.is_label[attr]) {
                        if (parse_label_value(value, line_no)) members.push_back(static_cast<LabelId>(roles.slot[attr]));
                    } else {
                        const double v = parse_feature_value(value, line_no);
                        if (v != 0.0) sf.entries.push_back({static_cast<std::uint32_t>(roles.slot[attr]), v});
                    }
                }
            }
            inst.features = std::move(sf);
        } else {
            any_dense = true;
            const auto tokens = split_quoted(s, ',');
            if (tokens.size() != attrs.size()) {
                throw ParseError(line_no, "row has " + std::to_string(tokens.size()) + " values, expected " +
                                              std::to_string(attrs.size()));
            }
            std::vector<double> x(n_features);
            for (std::size_t a = 0; a < attrs.size(); ++a) {
                if (roles.is_label[a]) {
                    if (parse_label_value(tokens[a], line_no)) members.push_back(static_cast<LabelId>(roles.slot[a]));
                } else {
                    x[roles.slot[a]] = parse_feature_value(tokens[a], line_no);
                }
            }
            inst.features = std::move(x);
        }
        if (roles.labels_present) inst.target = LabelSet(std::move(members));
        ds.instances.push_back(std::move(inst));
    }
    if (!in_data) throw ParseError(line_no, "no @data section");

    ds.sparse = any_sparse && !any_dense;
    ds.header.name = strip_meka_options(relation);
    ds.header.n = n_features;
    ds.header.label_names = roles.label_names;
    ds.header.label_position = roles.labels_present ? label_position(roles.is_label) : LabelPosition::suffix;
    return ds;
}

inline Dataset load_arff(const std::string& path, const LabelSpec& spec, const LoadOptions& options = {}) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open dataset '" + path + "'");
    return read_arff(in, spec, options);
}

/// CSV with a header row. Label columns come from an xml: or names: spec.
inline Dataset read_csv(std::istream& in, const LabelSpec& spec, const LoadOptions& options = {}) {
    using namespace detail;
    if (spec.kind == LabelSpec::Kind::meka) fail(ErrorCode::config, "CSV input needs --labels xml:<file> or names:...");
    std::string line;
    std::size_t line_no = 0;
    std::vector<Attribute> attrs;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError(line_no, "empty CSV file");
    for (auto cell : split_quoted(trim(line), ',')) attrs.push_back({unquote(cell), AttrType::numeric, line_no});

    AttributeRoles roles;
    try {
        roles = assign_roles(attrs, "", spec, options);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::parse) throw;
        throw ParseError(line_no, e.what());
    }
    Dataset ds;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
        if (!roles.is_label[a]) {
            ds.feature_names.push_back(attrs[a].name);
            ds.header.feature_kinds.push_back(FeatureKind::numeric);
        }
    }
    if (ds.feature_names.empty()) throw ParseError(line_no, "CSV has no feature columns");
    ds.universe = LabelUniverse(roles.label_names);
    const std::size_t n_features = ds.feature_names.size();

    while (std::getline(in, line)) {
        ++line_no;
        const auto s = trim(line);
        if (s.empty()) continue;
        const auto tokens = split_quoted(s, ',');
        if (tokens.size() != attrs.size()) {
            throw ParseError(line_no, "row has " + std::to_string(tokens.size()) + " values, expected " +
                                          std::to_string(attrs.size()));
        }
        Instance inst;
        std::vector<double> x(n_features);
        std::vector<LabelId> members;
        for (std::size_t a = 0; a < attrs.size(); ++a) {
            if (roles.is_label[a]) {
                if (parse_label_value(tokens[a], line_no)) members.push_back(static_cast<LabelId>(roles.slot[a]));
            } else {
                x[roles.slot[a]] = parse_feature_value(tokens[a], line_no);
            }
        }
        inst.features = std::move(x);
        if (roles.labels_present) inst.target = LabelSet(std::move(members));
        ds.instances.push_back(std::move(inst));
    }
    ds.header.n = n_features;
    ds.header.label_names = roles.label_names;
    ds.header.label_position = roles.labels_present ? label_position(roles.is_label) : LabelPosition::suffix;
    return ds;
}

/// Dispatches on the extension: .csv is CSV, anything else ARFF.
inline Dataset load_dataset(const std::string& path, const LabelSpec& spec, const LoadOptions& options = {}) {
    if (path.size() >= 4 && detail::lower(path.substr(path.size() - 4)) == ".csv") {
        std::ifstream in(path);
        if (!in) fail(ErrorCode::io, "cannot open dataset '" + path + "'");
        return read_csv(in, spec, options);
    }
    return load_arff(path, spec, options);
}

/// Writes ARFF in MEKA layout (labels first, "-C k" in the relation). Sparse
/// datasets are written as sparse rows.
inline void write_arff(const Dataset& ds, std::ostream& out) {
    using detail::format_double;
    using detail::quote_name;
    const std::size_t labels = ds.universe.size();
    out << "@relation " << quote_name(ds.header.name + ": -C " + std::to_string(labels)) << "\n\n";
    for (const auto& name : ds.universe.names()) out << "@attribute " << quote_name(name) << " {0,1}\n";
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i) {
        const auto kind = i < ds.header.feature_kinds.size() ? ds.header.feature_kinds[i] : FeatureKind::numeric;
        out << "@attribute " << quote_name(ds.feature_names[i]) << ' '
            << (kind == FeatureKind::binary ? "{0,1}" : kind == FeatureKind::count ? "integer" : "numeric") << '\n';
    }
    out << "\n@data\n";
    for (const auto& inst : ds.instances) {
        if (!inst.target) fail(ErrorCode::input, "cannot write an instance without target");
        if (ds.sparse) {
            const std::vector<double> x = densify(inst.features);
            out << '{';
            bool first = true;
            for (LabelId y : *inst.target) {
                out << (first ? "" : ",") << y << " 1";
                first = false;
            }
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] == 0.0) continue;
                out << (first ? "" : ",") << labels + i << ' ' << format_double(x[i]);
                first = false;
            }
            out << "}\n";
        } else {
            const std::vector<double> x = densify(inst.features);
            for (LabelId y = 0; y < labels; ++y) out << (inst.target->contains(y) ? "1" : "0") << ',';
            for (std::size_t i = 0; i < x.size(); ++i) out << (i ? "," : "") << format_double(x[i]);
            out << '\n';
        }
    }
}

struct TrainTestSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Seeded shuffle, then the first round(fraction * N) indices train.
inline TrainTestSplit split_train_test(std::size_t n_examples, double fraction, std::uint64_t seed) {
    if (n_examples == 0) fail(ErrorCode::input, "cannot split an empty dataset");
    if (!(fraction > 0.0 && fraction < 1.0)) fail(ErrorCode::input, "split fraction must be in (0, 1)");
    auto perm = shuffled_indices(n_examples, seed);
    const auto cut = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n_examples)));
    TrainTestSplit split;
    split.train.assign(perm.begin(), perm.begin() + static_cast<long>(cut));
    split.test.assign(perm.begin() + static_cast<long>(cut), perm.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

inline std::pair<Dataset, Dataset> split_train_test(const Dataset& ds, double fraction, std::uint64_t seed) {
    auto split = split_train_test(ds.size(), fraction, seed);
    return {ds.subset(split.train), ds.subset(split.test)};
}

}  // namespace naibx
