#pragma once

// Command-line front end. Kept in a header so tests can drive it in-process.

#include <naibx/baselines.hpp>
#include <naibx/cascade.hpp>
#include <naibx/dataio.hpp>
#include <naibx/error.hpp>
#include <naibx/metrics.hpp>
#include <naibx/model.hpp>
#include <naibx/model_io.hpp>
#include <naibx/oracle.hpp>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace naibx::cli {

enum class Command { train, predict, eval, cv, bench, inspect };
enum class Algo { naibx, naibx_truem, br, cc, lp_oracle };

inline std::string algo_name(Algo a) {
    switch (a) {
        case Algo::naibx: return "naibx";
        case Algo::naibx_truem: return "naibx-truem";
        case Algo::br: return "br";
        case Algo::cc: return "cc";
        case Algo::lp_oracle: return "lp-oracle";
    }
    return "?";
}

inline Algo parse_algo(const std::string& name) {
    for (Algo a : {Algo::naibx, Algo::naibx_truem, Algo::br, Algo::cc, Algo::lp_oracle}) {
        if (algo_name(a) == name) return a;
    }
    fail(ErrorCode::config, "unknown algorithm '" + name + "'");
}

struct RunConfig {
    Command command = Command::eval;
    std::vector<Algo> algos = {Algo::naibx};
    std::string data;
    std::string test_data;
    std::string labels = "meka";
    std::string model;
    std::size_t folds = 10;
    double split = 0.66;
    std::uint64_t seed = 0;
    LikelihoodKind likelihood = LikelihoodKind::gaussian;
    bool smoothing = true;
    bool timings = true;
    std::string chain_order;
    std::string out;

    PredictOptions predict_options() const {
        PredictOptions o;
        o.smoothing = smoothing ? Smoothing::laplace : Smoothing::none;
        return o;
    }
};

/// Rejects combinations that cannot run; throws ErrorCode::config.
inline void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) fail(ErrorCode::config, msg);
    };
    switch (c.command) {
        case Command::train:
            need(!c.data.empty() && !c.model.empty(), "train needs --data and --model");
            need(c.algos.size() == 1 && c.algos[0] == Algo::naibx, "train writes NAIBX models; use --algo naibx");
            break;
        case Command::predict:
            need(!c.data.empty() && !c.model.empty(), "predict needs --data and --model");
            need(c.algos.size() == 1 && (c.algos[0] == Algo::naibx || c.algos[0] == Algo::naibx_truem),
                 "predict runs a saved model; use --algo naibx or naibx-truem");
            break;
        case Command::eval:
        case Command::cv:
        case Command::bench:
            need(!c.data.empty(), "--data is required");
            need(c.split > 0.0 && c.split < 1.0, "--split must be in (0, 1)");
            need(c.folds >= 2, "--k must be at least 2");
            break;
        case Command::inspect:
            need(!c.model.empty(), "inspect needs --model");
            break;
    }
    for (Algo a : c.algos) {
        need(a != Algo::lp_oracle || c.likelihood == LikelihoodKind::gaussian,
             "lp-oracle supports only the gaussian likelihood");
    }
}

struct RunResult {
    std::vector<LabelSet> predictions;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

inline std::vector<LabelId> chain_order(const RunConfig& c, const LabelUniverse& universe) {
    std::vector<LabelId> order;
    if (c.chain_order.empty()) {
        for (LabelId y = 0; y < universe.size(); ++y) order.push_back(y);
        return order;
    }
    std::stringstream ss(c.chain_order);
    std::string name;
    while (std::getline(ss, name, ',')) order.push_back(universe.id(name));
    return order;
}

template <class Model>
RunResult run_baseline(Model model, const Dataset& train, const Dataset& test, PredictOptions options) {
    RunResult r;
    std::vector<std::vector<double>> train_x;
    train_x.reserve(train.size());
    for (const auto& inst : train.instances) train_x.push_back(densify(inst.features));
    std::vector<std::vector<double>> test_x;
    test_x.reserve(test.size());
    for (const auto& inst : test.instances) test_x.push_back(densify(inst.features));

    auto start = Clock::now();
    for (std::size_t i = 0; i < train.size(); ++i) model.add_example(train_x[i], *train.instances[i].target);
    r.train_seconds = seconds_since(start);
    start = Clock::now();
    for (const auto& x : test_x) r.predictions.push_back(model.predict(x, options));
    r.predict_seconds = seconds_since(start);
    return r;
}

}  // namespace detail

/// Trains `algo` on `train` and predicts every instance of `test`. Timings
/// cover only the training and prediction loops, not parsing.
inline RunResult run_algorithm(Algo algo, const Dataset& train, const Dataset& test, const RunConfig& config) {
    const std::size_t labels = train.universe.size();
    const std::size_t n = train.header.n;
    const PredictOptions options = config.predict_options();
    if (!train.has_targets()) fail(ErrorCode::config, "training data has no targets");
    if (algo == Algo::naibx_truem && !test.has_targets()) {
        fail(ErrorCode::config, "naibx-truem needs the true target sizes of the test data");
    }

    switch (algo) {
        case Algo::br:
            return detail::run_baseline(BinaryRelevance(labels, n, config.likelihood), train, test, options);
        case Algo::cc:
            return detail::run_baseline(ClassifierChain(detail::chain_order(config, train.universe), n, config.likelihood),
                                        train, test, options);
        case Algo::lp_oracle: {
            if (labels > kMaxOracleLabels) {
                fail(ErrorCode::budget, "lp-oracle refused: " + std::to_string(labels) + " labels exceeds the limit of " +
                                            std::to_string(kMaxOracleLabels));
            }
            struct Powerset {
                PowersetModel model;
                void add_example(std::span<const double> x, const LabelSet& y) { model.add_example(x, y); }
                LabelSet predict(std::span<const double> x, PredictOptions o) const { return model.predict(x, o); }
            };
            return detail::run_baseline(Powerset{PowersetModel(n)}, train, test, options);
        }
        case Algo::naibx:
        case Algo::naibx_truem: {
            RunResult r;
            ModelStore store(train.universe, n, config.likelihood);
            std::vector<std::vector<double>> test_x;
            for (const auto& inst : test.instances) test_x.push_back(densify(inst.features));
            auto start = detail::Clock::now();
            for (const auto& inst : train.instances) store.add_example(inst);
            r.train_seconds = detail::seconds_since(start);
            start = detail::Clock::now();
            for (std::size_t i = 0; i < test.size(); ++i) {
                std::optional<std::size_t> true_m;
                if (algo == Algo::naibx_truem) true_m = test.instances[i].target->size();
                r.predictions.push_back(predict_y(store, test_x[i], true_m, options).labels());
            }
            r.predict_seconds = detail::seconds_since(start);
            return r;
        }
    }
    fail(ErrorCode::config, "unsupported algorithm");
}

inline MetricsReport score(const RunResult& result, const Dataset& test) {
    MetricsReport m = evaluate(test.targets(), result.predictions, test.universe);
    m.train_seconds = result.train_seconds;
    m.predict_seconds = result.predict_seconds;
    return m;
}

inline std::vector<ReportRow> cross_validate(Algo algo, const Dataset& ds, const RunConfig& config, bool per_fold) {
    const auto folds = kfold_indices(ds.size(), config.folds, config.seed);
    std::vector<ReportRow> rows;
    std::vector<MetricsReport> reports;
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const Dataset train = ds.subset(folds[f].train);
        const Dataset test = ds.subset(folds[f].test);
        reports.push_back(score(run_algorithm(algo, train, test, config), test));
        if (per_fold) rows.push_back({ds.header.name, algo_name(algo), std::to_string(f + 1), reports.back()});
    }
    rows.push_back({ds.header.name, algo_name(algo), "mean", mean_report(reports)});
    return rows;
}

inline std::string format_labels(const LabelSet& set, const LabelUniverse& universe) {
    std::string out;
    for (LabelId y : set) {
        if (!out.empty()) out += ',';
        out += universe.name(y);
    }
    return out.empty() ? "-" : out;
}

inline void write_trace(std::ostream& os, std::size_t index, const PredictionTrace& trace,
                        const LabelUniverse& universe) {
    os << index << '\t' << trace.predicted_size << '\t' << format_labels(trace.labels(), universe) << '\t'
       << "size:" << format_fixed(trace.size_log_scores[trace.predicted_size], 6) << ':'
       << format_fixed(trace.size_normalized[trace.predicted_size], 6);
    for (const auto& c : trace.chosen) {
        os << ' ' << universe.name(c.label) << ':' << format_fixed(c.log_score, 6) << ':'
           << format_fixed(c.normalized, 6);
    }
    os << '\n';
}

/// Human-readable digest of a saved model.
inline void inspect(const ModelStore& store, std::ostream& os, std::size_t top_pairs = 10) {
    const auto& universe = store.universe();
    const std::size_t labels = store.label_count();
    os << "likelihood " << likelihood_name(store.likelihood()) << '\n';
    os << "features " << store.feature_count() << '\n';
    os << "labels " << labels << '\n';
    os << "N " << store.total_examples() << '\n';
    std::uint64_t size_sum = 0;
    os << "size_histogram";
    for (std::size_t m = 0; m <= labels; ++m) {
        os << ' ' << m << ':' << store.size_examples(m);
        size_sum += store.size_examples(m);
    }
    os << '\n' << "size_histogram_total " << size_sum << '\n';
    os << "label_counts";
    for (LabelId y = 0; y < labels; ++y) os << ' ' << universe.name(y) << ':' << store.label_examples(y);
    os << '\n';

    struct Pair {
        LabelId a, b;
        std::uint64_t ab, ba;
    };
    std::vector<Pair> pairs;
    for (LabelId a = 0; a < labels; ++a) {
        for (LabelId b = a + 1; b < labels; ++b) {
            if (store.pair_examples(a, b) || store.pair_examples(b, a)) {
                pairs.push_back({a, b, store.pair_examples(a, b), store.pair_examples(b, a)});
            }
        }
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.ab > y.ab; });
    if (pairs.size() > top_pairs) pairs.resize(top_pairs);
    os << "top_pairs " << pairs.size() << '\n';
    for (const auto& p : pairs) {
        os << "  " << universe.name(p.a) << ' ' << universe.name(p.b) << ' ' << p.ab << ' ' << p.ba << '\n';
    }

    if (const auto* g = store.given_label().gaussian()) {
        os << "feature_ranges (over label conditions with >= 1 example)\n";
        const std::size_t shown = std::min<std::size_t>(store.feature_count(), 20);
        for (std::size_t i = 0; i < shown; ++i) {
            double lo = 0.0, hi = 0.0, vlo = 0.0, vhi = 0.0;
            bool any = false;
            for (LabelId y = 0; y < labels; ++y) {
                const auto& mo = g->moments(y, i);
                if (mo.count == 0) continue;
                const double v = mo.sample_variance();
                if (!any) {
                    lo = hi = mo.mean;
                    vlo = vhi = v;
                    any = true;
                } else {
                    lo = std::min(lo, mo.mean);
                    hi = std::max(hi, mo.mean);
                    vlo = std::min(vlo, v);
                    vhi = std::max(vhi, v);
                }
            }
            os << "  f" << i << " mean[" << format_fixed(lo, 4) << ',' << format_fixed(hi, 4) << "] var["
               << format_fixed(vlo, 4) << ',' << format_fixed(vhi, 4) << "]\n";
        }
        if (shown < store.feature_count()) os << "  ... " << store.feature_count() - shown << " more\n";
    } else {
        const auto* t = store.given_label().text();
        os << "token_totals";
        for (LabelId y = 0; y < labels; ++y) os << ' ' << universe.name(y) << ':' << t->condition_total(y);
        os << '\n';
    }
}

namespace detail {

inline void emit(const RunConfig& c, const std::vector<ReportRow>& rows, std::ostream& out) {
    out << report_table(rows, c.timings);
    if (!c.out.empty()) {
        std::ofstream f(c.out);
        if (!f) fail(ErrorCode::io, "cannot write report '" + c.out + "'");
        f << report_csv(rows, c.timings);
    }
}

inline Dataset load_training_data(const RunConfig& c) {
    return load_dataset(c.data, LabelSpec::parse(c.labels));
}

}  // namespace detail

/// Executes one validated command.
inline void execute(const RunConfig& c, std::ostream& out) {
    validate(c);
    switch (c.command) {
        case Command::train: {
            const Dataset ds = detail::load_training_data(c);
            ModelStore store(ds.universe, ds.header.n, c.likelihood);
            const auto start = detail::Clock::now();
            for (const auto& inst : ds.instances) store.add_example(inst);
            const double secs = detail::seconds_since(start);
            save_model(store, c.model);
            out << "trained on " << ds.size() << " examples, " << ds.universe.size() << " labels, " << ds.header.n
                << " features";
            if (c.timings) out << " in " << format_fixed(secs, 4) << " s";
            out << "\nmodel written to " << c.model << '\n';
            return;
        }
        case Command::predict: {
            const ModelStore store = load_model(c.model);
            LoadOptions lo;
            lo.allow_missing_labels = true;
            const LabelSpec spec =
                c.labels == "meka" ? LabelSpec::from_names(store.universe().names()) : LabelSpec::parse(c.labels);
            const Dataset ds = load_dataset(c.data, spec, lo);
            if (ds.header.n != store.feature_count()) fail(ErrorCode::config, "data and model feature counts differ");
            const bool truem = c.algos[0] == Algo::naibx_truem;
            if (truem && !ds.has_targets()) {
                fail(ErrorCode::config, "naibx-truem needs targets in the input to know the true sizes");
            }
            std::ofstream file;
            if (!c.out.empty()) {
                file.open(c.out);
                if (!file) fail(ErrorCode::io, "cannot write predictions '" + c.out + "'");
            }
            std::ostream& os = c.out.empty() ? out : file;
            os << "# index\tsize\tlabels\ttrace(name:log_score:normalized)\n";
            std::vector<LabelSet> preds;
            for (std::size_t i = 0; i < ds.size(); ++i) {
                std::optional<std::size_t> true_m;
                if (truem) true_m = ds.instances[i].target->size();
                const auto trace = predict_y(store, densify(ds.instances[i].features), true_m, c.predict_options());
                write_trace(os, i, trace, store.universe());
                preds.push_back(trace.labels());
            }
            if (ds.has_targets() && ds.size() > 0) {
                std::vector<ReportRow> rows = {
                    {ds.header.name, algo_name(c.algos[0]), "all", evaluate(ds.targets(), preds, store.universe())}};
                out << report_table(rows, false);
            }
            return;
        }
        case Command::eval: {
            const Dataset ds = detail::load_training_data(c);
            Dataset train, test;
            if (!c.test_data.empty()) {
                train = ds;
                test = load_dataset(c.test_data, LabelSpec::from_names(ds.universe.names()));
            } else {
                std::tie(train, test) = split_train_test(ds, c.split, c.seed);
            }
            std::vector<ReportRow> rows;
            for (Algo a : c.algos) {
                rows.push_back({ds.header.name, algo_name(a), "split", score(run_algorithm(a, train, test, c), test)});
            }
            detail::emit(c, rows, out);
            return;
        }
        case Command::cv:
        case Command::bench: {
            const Dataset ds = detail::load_training_data(c);
            std::vector<ReportRow> rows;
            for (Algo a : c.algos) {
                auto r = cross_validate(a, ds, c, c.command == Command::cv);
                rows.insert(rows.end(), r.begin(), r.end());
            }
            detail::emit(c, rows, out);
            return;
        }
        case Command::inspect:
            inspect(load_model(c.model), out);
            return;
    }
}

inline int exit_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::config: return 2;
        case ErrorCode::io: return 3;
        case ErrorCode::parse: return 4;
        case ErrorCode::model_version:
        case ErrorCode::model_truncated:
        case ErrorCode::model_invariant: return 5;
        case ErrorCode::budget: return 6;
        default: return 1;
    }
}

inline void print_error(std::ostream& err, ErrorCode code, const std::string& message) {
    std::string one_line = message;
    std::replace(one_line.begin(), one_line.end(), '\n', ' ');
    err << "error[" << error_code_name(code) << "]: " << one_line << '\n';
}

/// Parses `args` (without the program name) and runs the command. Returns
/// the process exit status; failures print a single "error[CODE]: ..." line.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Online multi-label classification with a cascade of Naive Bayes predictors", "naibx"};
    app.require_subcommand(1);

    RunConfig c;
    std::string algo_list = "naibx";
    std::string likelihood = "gaussian";
    bool no_smoothing = false;
    bool no_timings = false;

    auto common = [&](CLI::App* sub, bool needs_data) {
        sub->add_option("--algo", algo_list, "naibx | naibx-truem | br | cc | lp-oracle (comma list for eval/cv/bench)");
        if (needs_data) {
            sub->add_option("--data", c.data, "dataset (ARFF or CSV)");
            sub->add_option("--labels", c.labels, "meka | xml:<file> | names:a,b,...");
        }
        sub->add_option("--likelihood", likelihood, "gaussian | bernoulli | multinomial");
        sub->add_flag("--no-smoothing", no_smoothing, "use raw frequency ratios");
        sub->add_option("--seed", c.seed, "shuffle seed (default 0)");
        sub->add_option("--out", c.out, "output file");
        sub->add_flag("--no-timings", no_timings, "omit wall-clock columns (byte-stable reports)");
        sub->add_option("--chain-order", c.chain_order, "label order for cc, comma separated names");
    };

    auto* train = app.add_subcommand("train", "train a NAIBX model and write it to --model");
    common(train, true);
    train->add_option("--model", c.model, "model file to write");
    auto* predict = app.add_subcommand("predict", "predict label sets with a saved model");
    common(predict, true);
    predict->add_option("--model", c.model, "model file to read");
    auto* eval = app.add_subcommand("eval", "train/test split evaluation");
    common(eval, true);
    eval->add_option("--split", c.split, "training fraction (default 0.66)");
    eval->add_option("--test", c.test_data, "separate test file instead of a split");
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation with per-fold reports");
    common(cv, true);
    cv->add_option("--k", c.folds, "number of folds (default 10)");
    auto* bench = app.add_subcommand("bench", "cross-validated comparison of several algorithms");
    common(bench, true);
    bench->add_option("--k", c.folds, "number of folds (default 10)");
    auto* insp = app.add_subcommand("inspect", "summarize a saved model");
    insp->add_option("--model", c.model, "model file to read");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend());
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error(err, ErrorCode::config, e.what());
        return exit_status(ErrorCode::config);
    }

    try {
        if (train->parsed()) c.command = Command::train;
        if (predict->parsed()) c.command = Command::predict;
        if (eval->parsed()) c.command = Command::eval;
        if (cv->parsed()) c.command = Command::cv;
        if (bench->parsed()) c.command = Command::bench;
        if (insp->parsed()) c.command = Command::inspect;

        if (bench->parsed() && bench->count("--algo") == 0) algo_list = "naibx,naibx-truem,br,cc";
        c.algos.clear();
        std::stringstream ss(algo_list);
        std::string name;
        while (std::getline(ss, name, ',')) c.algos.push_back(parse_algo(name));
        if (c.algos.empty()) fail(ErrorCode::config, "--algo is empty");
        c.likelihood = parse_likelihood(likelihood);
        c.smoothing = !no_smoothing;
        c.timings = !no_timings;
        execute(c, out);
        return 0;
    } catch (const Error& e) {
        print_error(err, e.code(), e.what());
        return exit_status(e.code());
    } catch (const std::exception& e) {
        print_error(err, ErrorCode::input, e.what());
        return 1;
    }
}

}  // namespace naibx::cli
