#pragma once

// Text model format:
//
//   NAIBX 1
//   likelihood gaussian|bernoulli|multinomial
//   features <n>
//   labels <L>
//   label <name>            (L lines, percent-escaped)
//   smoothing laplace 1
//   N <count>
//   <table> <dims...> : <values...>
//   ...
//   end
//
// Doubles are written in shortest round-trip form.

#include <naibx/error.hpp>
#include <naibx/likelihood.hpp>
#include <naibx/model.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace naibx {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string escape_label(const std::string& name) {
    std::string out;
    for (unsigned char c : name) {
        if (c <= 0x20 || c == '%' || c == 0x7f) {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out.empty() ? "%" : out;  // lone '%' encodes the empty name
}

inline std::string unescape_label(const std::string& text) {
    if (text == "%") return {};
    std::string out;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '%' && i + 2 < text.size()) {
            out.push_back(static_cast<char>(std::stoi(text.substr(i + 1, 2), nullptr, 16)));
            i += 2;
        } else {
            out.push_back(text[i]);
        }
    }
    return out;
}

inline std::string to_text(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

class ModelWriter {
public:
    explicit ModelWriter(std::ostream& out) : out_(out) {}

    template <class T>
    void table(const char* name, std::initializer_list<std::size_t> dims, const std::vector<T>& values) {
        out_ << name;
        for (auto d : dims) out_ << ' ' << d;
        out_ << " :";
        for (const auto& v : values) out_ << ' ' << v;
        out_ << '\n';
    }

    void moments(const char* name, std::size_t rows, std::size_t cols, const std::vector<GaussianMoments>& values) {
        out_ << name << ' ' << rows << ' ' << cols << " :";
        for (const auto& g : values) out_ << ' ' << g.count << ' ' << to_text(g.mean) << ' ' << to_text(g.m2);
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

class ModelReader {
public:
    explicit ModelReader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) fail(ErrorCode::model_truncated, "model file ends unexpectedly");
        return w;
    }

    void expect(const std::string& keyword) {
        const auto w = word();
        if (w != keyword) fail(ErrorCode::model_invariant, "expected '" + keyword + "' but found '" + w + "'");
    }

    std::uint64_t integer() {
        const auto w = word();
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || ptr != w.data() + w.size()) fail(ErrorCode::model_invariant, "bad integer '" + w + "'");
        return v;
    }

    double real() {
        const auto w = word();
        double v = 0;
        auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || ptr != w.data() + w.size()) fail(ErrorCode::model_invariant, "bad number '" + w + "'");
        return v;
    }

    void header(const char* name, std::initializer_list<std::size_t> dims) {
        expect(name);
        for (auto d : dims) {
            if (integer() != d) fail(ErrorCode::model_invariant, std::string("table '") + name + "' has wrong shape");
        }
        expect(":");
    }

    void counts(const char* name, std::initializer_list<std::size_t> dims, std::vector<std::uint64_t>& out) {
        header(name, dims);
        for (auto& v : out) v = integer();
    }

    void moments(const char* name, std::size_t rows, std::size_t cols, std::vector<GaussianMoments>& out) {
        header(name, {rows, cols});
        for (auto& g : out) {
            g.count = integer();
            g.mean = real();
            g.m2 = real();
        }
    }

private:
    std::istream& in_;
};

}  // namespace detail

inline void write_model(const ModelStore& store, std::ostream& out) {
    const std::size_t labels = store.label_count();
    const std::size_t n = store.feature_count();
    out << "NAIBX " << kModelFormatVersion << '\n';
    out << "likelihood " << likelihood_name(store.likelihood()) << '\n';
    out << "features " << n << '\n';
    out << "labels " << labels << '\n';
    for (const auto& name : store.universe().names()) out << "label " << detail::escape_label(name) << '\n';
    out << "smoothing laplace 1\n";
    out << "N " << store.total_examples() << '\n';

    detail::ModelWriter w(out);
    w.table("size_counts", {labels + 1}, store.size_counts());
    w.table("label_counts", {labels}, store.label_counts());
    w.table("pair_counts", {labels, labels}, store.pair_counts().data());
    w.table("size_given_label", {labels, labels + 1}, store.size_given_label_counts().data());
    if (const auto* g = store.given_label().gaussian()) {
        w.moments("label_moments", labels, n, g->table().data());
        w.moments("size_moments", labels + 1, n, store.given_size().gaussian()->table().data());
        w.moments("overall_moments", 1, n, store.overall());
    } else {
        const auto* lt = store.given_label().text();
        const auto* st = store.given_size().text();
        w.table("label_tokens", {labels, n}, lt->counts().data());
        w.table("label_token_totals", {labels}, lt->totals());
        w.table("size_tokens", {labels + 1, n}, st->counts().data());
        w.table("size_token_totals", {labels + 1}, st->totals());
    }
    out << "end\n";
}

inline ModelStore read_model(std::istream& in) {
    detail::ModelReader r(in);
    std::string magic;
    if (!(in >> magic)) fail(ErrorCode::model_truncated, "empty model file");
    if (magic != "NAIBX") fail(ErrorCode::model_version, "not a NAIBX model file");
    const auto version = r.integer();
    if (version != kModelFormatVersion) {
        fail(ErrorCode::model_version, "unsupported model format version " + std::to_string(version));
    }
    r.expect("likelihood");
    LikelihoodKind kind;
    try {
        kind = parse_likelihood(r.word());
    } catch (const Error& e) {
        fail(ErrorCode::model_invariant, e.what());
    }
    r.expect("features");
    const auto n = static_cast<std::size_t>(r.integer());
    r.expect("labels");
    const auto labels = static_cast<std::size_t>(r.integer());
    if (n == 0 || labels == 0) fail(ErrorCode::model_invariant, "model has no features or labels");
    std::vector<std::string> names;
    for (std::size_t j = 0; j < labels; ++j) {
        r.expect("label");
        names.push_back(detail::unescape_label(r.word()));
    }
    r.expect("smoothing");
    r.expect("laplace");
    r.expect("1");

    ModelStore store(LabelUniverse(std::move(names)), n, kind);
    auto t = store.tables();
    r.expect("N");
    t.total = r.integer();
    r.counts("size_counts", {labels + 1}, t.size_counts);
    r.counts("label_counts", {labels}, t.label_counts);
    r.counts("pair_counts", {labels, labels}, t.pair_counts.data());
    r.counts("size_given_label", {labels, labels + 1}, t.size_given_label.data());
    if (kind == LikelihoodKind::gaussian) {
        auto* lg = t.given_label.gaussian();
        auto* sg = t.given_size.gaussian();
        r.moments("label_moments", labels, n, lg->table().data());
        r.moments("size_moments", labels + 1, n, sg->table().data());
        r.moments("overall_moments", 1, n, t.overall);
        lg->counts() = t.label_counts;
        sg->counts() = t.size_counts;
    } else {
        auto* lt = t.given_label.text();
        auto* st = t.given_size.text();
        r.counts("label_tokens", {labels, n}, lt->counts().data());
        r.counts("label_token_totals", {labels}, lt->totals());
        r.counts("size_tokens", {labels + 1, n}, st->counts().data());
        r.counts("size_token_totals", {labels + 1}, st->totals());
    }
    r.expect("end");
    store.check_invariants();
    return store;
}

inline void save_model(const ModelStore& store, const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::io, "cannot write model file '" + path + "'");
    write_model(store, out);
    if (!out) fail(ErrorCode::io, "failed writing model file '" + path + "'");
}

inline ModelStore load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::io, "cannot open model file '" + path + "'");
    return read_model(in);
}

}  // namespace naibx
