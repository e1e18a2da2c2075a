#include "conformal/cli/run.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "conformal/classification.hpp"
#include "conformal/cli/csv.hpp"
#include "conformal/cli/format.hpp"
#include "conformal/learners.hpp"
#include "conformal/metrics.hpp"
#include "conformal/regression.hpp"
#include "conformal/rng.hpp"
#include "conformal/synth.hpp"
#include "conformal/timeseries.hpp"

namespace conformal::cli {

using nlohmann::json;

const char* to_string(Task task) {
    switch (task) {
        case Task::regress: return "regress";
        case Task::classify: return "classify";
        case Task::timeseries: return "timeseries";
        case Task::synth: return "synth";
        case Task::bench: return "bench";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// argument parsing

namespace {

void add_common(CLI::App& cmd, RunConfig& c) {
    cmd.add_option("--alpha", c.alphas, "Miscoverage rate in (0, 1); repeatable")
        ->take_all()
        ->allow_extra_args(false);
    cmd.add_option("--seed", c.seed, "Seed for every random choice");
    cmd.add_option("--threads", c.threads,
                   "Worker threads (default: CONFORMAL_KIT_THREADS or all cores)");
    cmd.add_option("--out", c.out, "Output file (default: stdout)");
    cmd.add_option("--format", c.format, "Output format")
        ->transform(CLI::CheckedTransformer(
            std::map<std::string, OutputFormat>{{"json", OutputFormat::json},
                                                {"csv", OutputFormat::csv}}))
        ->option_text("{json,csv}");
}

void add_data(CLI::App& cmd, RunConfig& c) {
    cmd.add_option("--data", c.data, "Training CSV (header row required)")->required();
    cmd.add_option("--test-data", c.test_data, "Test CSV with the same columns");
    cmd.add_option("--target", c.target, "Name of the target column");
}

void add_regressor(CLI::App& cmd, RunConfig& c) {
    cmd.add_option("--learner", c.learner, "Base regressor")
        ->check(CLI::IsMember({"ols", "knn"}));
    cmd.add_option("--knn-k", c.knn_k, "Neighbours for --learner knn");
    cmd.add_option("--aggregation", c.aggregation, "Out-of-bag aggregation")
        ->check(CLI::IsMember({"mean", "median"}));
    cmd.add_option("--n-bootstraps", c.n_bootstraps, "Bootstrap resamples");
}

void add_classifier(CLI::App& cmd, RunConfig& c) {
    cmd.add_option("--epochs", c.epochs, "Gradient-descent epochs for the softmax model");
    cmd.add_option("--l2", c.l2, "L2 penalty for the softmax model");
    cmd.add_option("--temperature", c.temperature,
                   "Divide the model's logits by this value (< 1 makes it over-confident)");
}

void add_generator(CLI::App& cmd, RunConfig& c) {
    cmd.add_option("--n", c.n, "Number of rows");
    cmd.add_option("--d", c.d, "Number of features");
    cmd.add_option("--noise", c.noise, "Noise standard deviation");
    cmd.add_option("--n-classes", c.n_classes, "Classes for blobs");
    cmd.add_option("--separation", c.separation, "Distance of blob centres from the origin");
    cmd.add_option("--phi", c.phi, "AR(1) coefficient");
    cmd.add_option("--shift", c.shift, "Level shift added from --shift-index on");
    cmd.add_option("--shift-index", c.shift_index, "First shifted time step (default n/2)");
}

void build_app(CLI::App& app, RunConfig& c) {
    app.require_subcommand(1);

    auto* regress = app.add_subcommand("regress", "Prediction intervals for tabular regression");
    add_data(*regress, c);
    add_regressor(*regress, c);
    add_common(*regress, c);
    regress->add_option("--calib-data", c.calib_data, "Calibration CSV for --cv prefit");
    regress->add_option("--calib-fraction", c.calib_fraction,
                        "Share of --data held out for calibration when --cv prefit has no --calib-data");
    regress->add_option("--method", c.method, "Interval construction")
        ->check(CLI::IsMember({"base", "plus", "minmax"}));
    regress->add_option("--cv", c.cv, "prefit | loo | bootstrap | K");

    auto* classify = app.add_subcommand("classify", "Prediction sets for multi-class data");
    add_data(*classify, c);
    add_classifier(*classify, c);
    add_common(*classify, c);
    classify->add_option("--calib-data", c.calib_data, "Calibration CSV");
    classify->add_option("--calib-fraction", c.calib_fraction,
                         "Share of --data held out for calibration when --calib-data is absent");
    classify->add_option("--method", c.method, "Set construction")
        ->check(CLI::IsMember({"score", "cumulated-score", "random-cumulated-score", "top-k",
                               "naive"}));
    classify->add_option("--cv", c.cv, "Only prefit is supported for classification");

    auto* ts = app.add_subcommand("timeseries", "EnbPI intervals for ordered data");
    add_data(*ts, c);
    add_regressor(*ts, c);
    add_common(*ts, c);
    ts->add_option("--method", c.method, "Only enbpi")->check(CLI::IsMember({"enbpi"}));
    ts->add_option("--block-length", c.block_length, "Block bootstrap length");
    ts->add_option("--beta-grid", c.beta_grid, "Grid size for the asymmetric quantile search");
    ts->add_option("--lags", c.lags, "Build this many lag features from the target column");
    ts->add_flag("--update-residuals", c.update_residuals,
                 "Refresh the residual window with each observed test value");
    ts->add_option("--rolling-window", c.rolling_window, "Also report rolling coverage");

    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
    synth->add_option("--generator", c.generator, "Generator")
        ->check(CLI::IsMember({"linear", "heteroscedastic", "blobs", "ar1"}));
    add_generator(*synth, c);
    synth->add_option("--seed", c.seed, "Generator seed");
    synth->add_option("--out", c.out, "Output CSV")->required();

    auto* bench = app.add_subcommand("bench", "Coverage / width / set-size sweep over alpha");
    bench->add_option("--problem", c.problem, "Benchmark family")
        ->check(CLI::IsMember({"regression", "classification"}));
    add_generator(*bench, c);
    add_regressor(*bench, c);
    add_classifier(*bench, c);
    add_common(*bench, c);
    bench->add_option("--cv", c.cv, "Resampling for the regression family");
    bench->add_option("--calib-fraction", c.calib_fraction, "Calibration share for --cv prefit");
    bench->add_option("--n-train", c.n_train, "Training rows per trial");
    bench->add_option("--n-calib", c.n_calib, "Calibration rows per trial (classification)");
    bench->add_option("--n-test", c.n_test, "Test rows per trial");
    bench->add_option("--trials", c.trials, "Independent trials averaged per cell");
}

Task task_of(const CLI::App& app) {
    const auto* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "regress") return Task::regress;
    if (name == "classify") return Task::classify;
    if (name == "timeseries") return Task::timeseries;
    if (name == "synth") return Task::synth;
    return Task::bench;
}

std::vector<const char*> as_argv(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"conformal-kit"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return argv;
}

}  // namespace

RunConfig parse_command_line(const std::vector<std::string>& args) {
    RunConfig config;
    CLI::App app{"conformal-kit"};
    build_app(app, config);
    auto argv = as_argv(args);
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    config.task = task_of(app);
    return config;
}

// ---------------------------------------------------------------------------
// validation

namespace {

std::string default_method(Task task) {
    switch (task) {
        case Task::regress: return "plus";
        case Task::classify: return "score";
        case Task::timeseries: return "enbpi";
        default: return "";
    }
}

std::string method_of(const RunConfig& c) { return c.method.empty() ? default_method(c.task) : c.method; }

ResamplingScheme scheme_of(const RunConfig& c) {
    const Aggregation agg = c.aggregation == "median" ? Aggregation::median : Aggregation::mean;
    if (c.cv == "prefit") return ResamplingScheme::prefit();
    if (c.cv == "loo") return ResamplingScheme::leave_one_out();
    if (c.cv == "bootstrap") return ResamplingScheme::bootstrap(c.n_bootstraps, agg, c.seed);
    std::size_t k = 0;
    try {
        std::size_t used = 0;
        const long v = std::stol(c.cv, &used);
        if (used != c.cv.size() || v < 2) throw std::invalid_argument("K");
        k = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw UsageError("--cv must be prefit, loo, bootstrap or an integer K >= 2, got '" + c.cv +
                         "'");
    }
    return ResamplingScheme::kfold(k, c.seed);
}

}  // namespace

void validate(const RunConfig& c) {
    if (c.task != Task::synth) {
        if (c.alphas.empty()) throw UsageError("at least one --alpha is required");
        for (double a : c.alphas) {
            if (!(a > 0.0 && a < 1.0)) {
                throw UsageError("--alpha must lie in (0, 1), got " + format_double(a));
            }
        }
    }
    if ((c.task == Task::regress || c.task == Task::classify || c.task == Task::timeseries) &&
        c.test_data.empty()) {
        throw UsageError("--test-data is required for " + std::string(to_string(c.task)));
    }
    if (c.calib_fraction <= 0.0 || c.calib_fraction >= 1.0) {
        throw UsageError("--calib-fraction must lie in (0, 1)");
    }
    if (c.task == Task::regress || (c.task == Task::bench && c.problem == "regression")) {
        scheme_of(c);
        if (c.cv == "prefit" && !c.method.empty() && c.method != "base") {
            throw UsageError("--cv prefit only supports --method base");
        }
    }
    if (c.task == Task::classify && c.cv != "prefit" && c.cv != "5") {
        throw UsageError("classification supports only --cv prefit");
    }
    if (c.learner == "knn" && c.knn_k == 0) throw UsageError("--knn-k must be >= 1");
    if (c.n_bootstraps < 2) throw UsageError("--n-bootstraps must be >= 2");
    if (c.block_length < 1) throw UsageError("--block-length must be >= 1");
    if (c.beta_grid < 2) throw UsageError("--beta-grid must be >= 2");
    if (c.epochs < 1) throw UsageError("--epochs must be >= 1");
    if (!(c.temperature > 0)) throw UsageError("--temperature must be positive");
    if (c.task == Task::bench) {
        if (c.trials < 1) throw UsageError("--trials must be >= 1");
        if (c.n_train < 3 || c.n_test < 1) throw UsageError("bench needs --n-train >= 3 and --n-test >= 1");
        if (c.problem == "classification" && c.n_calib < 1) throw UsageError("--n-calib must be >= 1");
    }
}

// ---------------------------------------------------------------------------
// execution

namespace {

json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

std::unique_ptr<Regressor> make_regressor(const RunConfig& c) {
    if (c.learner == "knn") return std::make_unique<KnnRegressor>(c.knn_k);
    return std::make_unique<OlsRegressor>();
}

std::shared_ptr<const Classifier> make_classifier(const RunConfig& c, const Dataset& train) {
    SoftmaxOptions options;
    options.l2 = c.l2;
    options.epochs = c.epochs;
    options.seed = c.seed;
    auto model = std::make_shared<SoftmaxClassifier>(options);
    model->fit(train);
    if (c.temperature == 1.0) return model;
    return std::make_shared<TemperatureScaledClassifier>(model, c.temperature);
}

ClassificationMethod classification_method(const std::string& name, std::uint64_t seed) {
    if (name == "score") return ClassificationMethod::label();
    if (name == "cumulated-score") return ClassificationMethod::aps();
    if (name == "random-cumulated-score") return ClassificationMethod::aps_randomized(seed);
    if (name == "top-k") return ClassificationMethod::top_k();
    if (name == "naive") return ClassificationMethod::naive();
    throw UsageError("unknown classification method '" + name + "'");
}

IntervalMethod interval_method(const std::string& name) {
    if (name == "base") return IntervalMethod::base;
    if (name == "minmax") return IntervalMethod::minmax;
    return IntervalMethod::plus;
}

// Seeded shuffle split into (fit, calibration).
std::pair<Dataset, Dataset> split(const Dataset& data, double calib_fraction, std::uint64_t seed) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng = Rng::stream(seed, 0x5b1170);
    shuffle(order, rng);
    const auto n_calib = static_cast<std::size_t>(
        std::llround(calib_fraction * static_cast<double>(data.size())));
    if (n_calib == 0 || n_calib >= data.size()) {
        throw std::runtime_error("calibration split leaves an empty side");
    }
    std::vector<std::size_t> fit_rows(order.begin() + static_cast<std::ptrdiff_t>(n_calib), order.end());
    std::vector<std::size_t> calib_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_calib));
    std::sort(fit_rows.begin(), fit_rows.end());
    std::sort(calib_rows.begin(), calib_rows.end());
    return {data.subset(fit_rows), data.subset(calib_rows)};
}

std::vector<std::size_t> range(std::size_t begin, std::size_t end) {
    std::vector<std::size_t> out(end - begin);
    std::iota(out.begin(), out.end(), begin);
    return out;
}

std::vector<int> labels_of(const Dataset& data) {
    std::vector<int> y(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) y[i] = data.label(i);
    return y;
}

json config_json(const RunConfig& c) {
    json j;
    j["task"] = to_string(c.task);
    json alphas = json::array();
    for (double a : c.alphas) alphas.push_back(a);
    j["seed"] = c.seed;
    switch (c.task) {
        case Task::regress:
        case Task::classify:
        case Task::timeseries:
            j["data"] = c.data;
            j["test_data"] = c.test_data;
            j["target"] = c.target;
            j["method"] = method_of(c);
            j["alpha"] = alphas;
            break;
        case Task::synth:
        case Task::bench:
            j["generator"] = c.task == Task::bench
                                 ? (c.problem == "regression" ? "linear" : "blobs")
                                 : c.generator;
            j["n"] = c.n;
            j["d"] = c.d;
            j["noise"] = c.noise;
            j["n_classes"] = c.n_classes;
            j["separation"] = c.separation;
            if (c.task == Task::synth) {
                j["phi"] = c.phi;
                j["shift"] = c.shift;
                j["shift_index"] = c.shift_index;
            }
            break;
    }
    if (c.task == Task::regress || c.task == Task::timeseries ||
        (c.task == Task::bench && c.problem == "regression")) {
        j["learner"] = c.learner;
        if (c.learner == "knn") j["knn_k"] = c.knn_k;
        j["aggregation"] = c.aggregation;
        j["n_bootstraps"] = c.n_bootstraps;
    }
    if (c.task == Task::regress || c.task == Task::bench) j["cv"] = c.cv;
    if (c.task == Task::regress || c.task == Task::classify) {
        if (!c.calib_data.empty()) j["calib_data"] = c.calib_data;
        j["calib_fraction"] = c.calib_fraction;
    }
    if (c.task == Task::classify || (c.task == Task::bench && c.problem == "classification")) {
        j["epochs"] = c.epochs;
        j["l2"] = c.l2;
        j["temperature"] = c.temperature;
    }
    if (c.task == Task::timeseries) {
        j["block_length"] = c.block_length;
        j["beta_grid"] = c.beta_grid;
        j["lags"] = c.lags;
        j["update_residuals"] = c.update_residuals;
        j["rolling_window"] = c.rolling_window;
    }
    if (c.task == Task::bench) {
        j["problem"] = c.problem;
        j["alpha"] = alphas;
        j["n_train"] = c.n_train;
        j["n_test"] = c.n_test;
        if (c.problem == "classification") j["n_calib"] = c.n_calib;
        j["trials"] = c.trials;
        if (c.cv == "prefit") j["calib_fraction"] = c.calib_fraction;
    }
    return j;
}

json regression_report_json(const RegressionReport& r) {
    return {{"coverage", r.coverage},
            {"mean_width", number(r.mean_width)},
            {"n_infinite", r.n_infinite},
            {"n", r.n}};
}

json classification_report_json(const ClassificationReport& r) {
    return {{"coverage", r.coverage},
            {"mean_set_size", r.mean_set_size},
            {"empty_fraction", r.empty_fraction},
            {"n", r.n}};
}

json interval_records(const std::vector<PredictionInterval>& intervals, std::span<const double> y) {
    json records = json::array();
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        records.push_back({{"index", i},
                           {"y", y[i]},
                           {"point", intervals[i].point},
                           {"lower", number(intervals[i].lower)},
                           {"upper", number(intervals[i].upper)}});
    }
    return records;
}

FittedConformalRegressor fit_regression(const RunConfig& c, const Regressor& learner,
                                        const Dataset& train, const std::string& method) {
    const ResamplingScheme scheme = scheme_of(c);
    if (scheme.kind == ResamplingScheme::Kind::prefit) {
        Dataset fit_part = train;
        Dataset calib_part = train;
        if (!c.calib_data.empty()) {
            calib_part = load_csv(c.calib_data, c.target);
        } else {
            std::tie(fit_part, calib_part) = split(train, c.calib_fraction, c.seed);
        }
        auto model = learner.clone();
        model->fit(fit_part);
        return fit_split(RegressorPtr(std::move(model)), calib_part);
    }
    return fit_cross(learner, train, scheme, interval_method(method), c.threads);
}

json run_regress(const RunConfig& c) {
    const Dataset train = load_csv(c.data, c.target);
    const Dataset test = load_csv(c.test_data, c.target);
    const auto learner = make_regressor(c);
    const auto state = fit_regression(c, *learner, train, method_of(c));

    json per_alpha = json::array();
    for (double a : c.alphas) {
        const auto intervals = state.predict_batch(test.features(), RiskLevel(a), c.threads);
        per_alpha.push_back({{"alpha", a},
                             {"predictions", interval_records(intervals, test.targets())},
                             {"report", regression_report_json(
                                            regression_report(test.targets(), intervals))}});
    }
    return {{"config", config_json(c)}, {"per_alpha", per_alpha}};
}

json run_classify(const RunConfig& c) {
    const Dataset data = load_csv(c.data, c.target, TargetKind::label);
    Dataset test = load_csv(c.test_data, c.target, TargetKind::label);
    Dataset fit_part = data;
    Dataset calib_part = data;
    if (!c.calib_data.empty()) {
        calib_part = load_csv(c.calib_data, c.target, TargetKind::label);
    } else {
        std::tie(fit_part, calib_part) = split(data, c.calib_fraction, c.seed);
    }
    const auto model = make_classifier(c, fit_part);
    const auto state = calibrate(model, calib_part, classification_method(method_of(c), c.seed));
    const auto y = labels_of(test);

    json per_alpha = json::array();
    for (double a : c.alphas) {
        const auto sets = state.predict_set_batch(test.features(), RiskLevel(a), c.threads);
        json records = json::array();
        for (std::size_t i = 0; i < sets.size(); ++i) {
            records.push_back({{"index", i},
                               {"y", y[i]},
                               {"point_label", sets[i].point_label},
                               {"set", sets[i].labels()}});
        }
        per_alpha.push_back({{"alpha", a},
                             {"quantile", number(state.quantile(RiskLevel(a)))},
                             {"predictions", records},
                             {"report", classification_report_json(
                                            classification_report(y, sets))}});
    }
    return {{"config", config_json(c)}, {"per_alpha", per_alpha}};
}

std::pair<Dataset, Dataset> timeseries_data(const RunConfig& c) {
    const Dataset train_raw = load_csv(c.data, c.target);
    const Dataset test_raw = load_csv(c.test_data, c.target);
    if (c.lags == 0) return {train_raw, test_raw};

    std::vector<double> series(train_raw.targets().begin(), train_raw.targets().end());
    series.insert(series.end(), test_raw.targets().begin(), test_raw.targets().end());
    const Dataset lagged = build_lag_features(series, c.lags);
    if (train_raw.size() <= c.lags) throw std::runtime_error("training series shorter than --lags");
    const std::size_t n_train = train_raw.size() - c.lags;
    return {lagged.subset(range(0, n_train)), lagged.subset(range(n_train, lagged.size()))};
}

json run_timeseries(const RunConfig& c) {
    const auto [train, test] = timeseries_data(c);
    const auto learner = make_regressor(c);
    EnbpiConfig config;
    config.n_bootstraps = c.n_bootstraps;
    config.block_length = c.block_length;
    config.aggregation = c.aggregation == "median" ? Aggregation::median : Aggregation::mean;
    config.beta_grid_size = c.beta_grid;
    config.seed = c.seed;
    const FittedEnbpi fitted = fit_enbpi(*learner, train, config, c.threads);

    json per_alpha = json::array();
    for (double a : c.alphas) {
        FittedEnbpi state = fitted;
        std::vector<PredictionInterval> intervals;
        intervals.reserve(test.size());
        for (std::size_t t = 0; t < test.size(); ++t) {
            intervals.push_back(state.predict(test.row(t), RiskLevel(a)));
            if (c.update_residuals) {
                const std::size_t row[] = {t};
                state.update_scores(test.features().select_rows(row), test.targets().subspan(t, 1));
            }
        }
        json entry = {{"alpha", a},
                      {"predictions", interval_records(intervals, test.targets())},
                      {"report", regression_report_json(
                                     regression_report(test.targets(), intervals))}};
        if (c.rolling_window > 0) {
            json rolling = json::array();
            for (double v : rolling_coverage(test.targets(), intervals, c.rolling_window)) {
                rolling.push_back(v);
            }
            entry["rolling_coverage"] = rolling;
        }
        per_alpha.push_back(std::move(entry));
    }
    return {{"config", config_json(c)}, {"per_alpha", per_alpha}};
}

GeneratorSpec generator_spec(const RunConfig& c) {
    GeneratorSpec spec;
    spec.seed = c.seed;
    if (c.generator == "linear") {
        spec.kind = LinearGaussian{c.n, c.d, c.noise};
    } else if (c.generator == "heteroscedastic") {
        spec.kind = Heteroscedastic{c.n, Heteroscedastic::NoiseScale::linear_in_x};
    } else if (c.generator == "blobs") {
        spec.kind = Blobs{c.n, c.n_classes, c.d, c.separation};
    } else {
        spec.kind = Ar1Changepoint{c.n, c.phi, c.noise, c.shift,
                                   c.shift_index == 0 ? c.n / 2 : c.shift_index};
    }
    return spec;
}

json run_synth(const RunConfig& c) {
    write_csv(c.out, generate(generator_spec(c)));
    return {{"config", config_json(c)}};
}

// Mean of each numeric field across trials.
json average_reports(const std::vector<json>& reports) {
    json mean = reports.front();
    for (auto& [key, value] : mean.items()) {
        if (!value.is_number()) continue;
        bool infinite = false;
        double sum = 0.0;
        for (const auto& r : reports) {
            if (!r[key].is_number()) {
                infinite = true;
                break;
            }
            sum += r[key].get<double>();
        }
        if (infinite) {
            value = format_double(std::numeric_limits<double>::infinity());
        } else if (reports.size() > 1 || value.is_number_float()) {
            value = sum / static_cast<double>(reports.size());
        }
    }
    return mean;
}

json run_bench(const RunConfig& c) {
    const bool regression = c.problem == "regression";
    std::vector<std::string> methods;
    if (regression) {
        methods = c.cv == "prefit" ? std::vector<std::string>{"base"}
                                   : std::vector<std::string>{"base", "plus", "minmax"};
    } else {
        methods = {"naive", "score", "cumulated-score", "random-cumulated-score", "top-k"};
    }

    // reports[alpha][method] -> one report per trial
    std::vector<std::vector<std::vector<json>>> reports(
        c.alphas.size(), std::vector<std::vector<json>>(methods.size()));

    for (std::size_t trial = 0; trial < c.trials; ++trial) {
        const std::uint64_t trial_seed = c.seed + trial;
        if (regression) {
            GeneratorSpec spec{LinearGaussian{c.n_train + c.n_test, c.d, c.noise}, trial_seed};
            const Dataset all = generate(spec);
            const Dataset train = all.subset(range(0, c.n_train));
            const Dataset test = all.subset(range(c.n_train, all.size()));
            const auto learner = make_regressor(c);
            RunConfig trial_config = c;
            trial_config.seed = trial_seed;
            for (std::size_t m = 0; m < methods.size(); ++m) {
                const auto state = fit_regression(trial_config, *learner, train, methods[m]);
                for (std::size_t a = 0; a < c.alphas.size(); ++a) {
                    const auto intervals =
                        state.predict_batch(test.features(), RiskLevel(c.alphas[a]), c.threads);
                    reports[a][m].push_back(
                        regression_report_json(regression_report(test.targets(), intervals)));
                }
            }
        } else {
            GeneratorSpec spec{Blobs{c.n_train + c.n_calib + c.n_test, c.n_classes, c.d, c.separation},
                               trial_seed};
            const Dataset all = generate(spec);
            const Dataset train = all.subset(range(0, c.n_train));
            const Dataset calib = all.subset(range(c.n_train, c.n_train + c.n_calib));
            const Dataset test = all.subset(range(c.n_train + c.n_calib, all.size()));
            RunConfig trial_config = c;
            trial_config.seed = trial_seed;
            const auto model = make_classifier(trial_config, train);
            const auto y = labels_of(test);
            for (std::size_t m = 0; m < methods.size(); ++m) {
                const auto state =
                    calibrate(model, calib, classification_method(methods[m], trial_seed));
                for (std::size_t a = 0; a < c.alphas.size(); ++a) {
                    const auto sets =
                        state.predict_set_batch(test.features(), RiskLevel(c.alphas[a]), c.threads);
                    reports[a][m].push_back(
                        classification_report_json(classification_report(y, sets)));
                }
            }
        }
    }

    json per_alpha = json::array();
    for (std::size_t a = 0; a < c.alphas.size(); ++a) {
        json rows = json::array();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            rows.push_back({{"method", methods[m]}, {"report", average_reports(reports[a][m])}});
        }
        per_alpha.push_back({{"alpha", c.alphas[a]}, {"methods", rows}});
    }
    return {{"config", config_json(c)}, {"per_alpha", per_alpha}};
}

// ---------------------------------------------------------------------------
// rendering

std::string cell(const json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
    if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_array()) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ';';
            out += cell(v[i]);
        }
        return out;
    }
    return "";
}

void write_row(std::ostringstream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

std::string render_csv(const json& result, Task task) {
    std::ostringstream os;
    if (task == Task::bench) {
        const bool regression = result["config"]["problem"] == "regression";
        const std::vector<std::string> fields =
            regression ? std::vector<std::string>{"coverage", "mean_width", "n_infinite"}
                       : std::vector<std::string>{"coverage", "mean_set_size", "empty_fraction"};
        std::vector<std::string> header{"alpha", "method"};
        header.insert(header.end(), fields.begin(), fields.end());
        write_row(os, header);
        for (const auto& entry : result["per_alpha"]) {
            for (const auto& row : entry["methods"]) {
                std::vector<std::string> cells{cell(entry["alpha"]), cell(row["method"])};
                for (const auto& f : fields) cells.push_back(cell(row["report"][f]));
                write_row(os, cells);
            }
        }
        return os.str();
    }

    const std::vector<std::string> fields =
        task == Task::classify ? std::vector<std::string>{"index", "y", "point_label", "set"}
                               : std::vector<std::string>{"index", "y", "point", "lower", "upper"};
    std::vector<std::string> header{"alpha"};
    header.insert(header.end(), fields.begin(), fields.end());
    write_row(os, header);
    for (const auto& entry : result["per_alpha"]) {
        for (const auto& record : entry["predictions"]) {
            std::vector<std::string> cells{cell(entry["alpha"])};
            for (const auto& f : fields) cells.push_back(cell(record[f]));
            write_row(os, cells);
        }
    }
    return os.str();
}

}  // namespace

json execute(const RunConfig& config) {
    switch (config.task) {
        case Task::regress: return run_regress(config);
        case Task::classify: return run_classify(config);
        case Task::timeseries: return run_timeseries(config);
        case Task::synth: return run_synth(config);
        case Task::bench: return run_bench(config);
    }
    throw std::logic_error("unknown task");
}

std::string render(const json& result, Task task, OutputFormat format) {
    if (format == OutputFormat::csv) return render_csv(result, task);
    return result.dump(2) + "\n";
}

void run(const RunConfig& config, std::ostream& out) {
    validate(config);
    const json result = execute(config);
    if (config.task == Task::synth) return;
    const std::string text = render(result, config.task, config.format);
    if (config.out.empty()) {
        out << text;
        return;
    }
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + config.out + "'");
    file << text;
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig config;
    CLI::App app{"conformal-kit: distribution-free prediction intervals and sets"};
    build_app(app, config);
    auto argv = as_argv(args);
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    config.task = task_of(app);

    try {
        run(config, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}

}  // namespace conformal::cli
