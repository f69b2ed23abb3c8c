#include "wavecast/pipeline.hpp"

#include "wavecast/checkpoint.hpp"
#include "wavecast/csv.hpp"
#include "wavecast/error.hpp"
#include "wavecast/swt.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace wavecast {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::atomic<int> g_verbosity{1};

void log(int level, const std::string& msg) {
    if (g_verbosity.load() >= level) {
        std::fprintf(stderr, "%s\n", msg.c_str());
    }
}

struct Context {
    const Manifest& manifest;
    fs::path out;
    unsigned threads = 1;
    CommandResult result;

    void write(const fs::path& relative, std::string_view text) {
        const fs::path target = out / relative;
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        require(!ec, ErrorKind::Io, "cannot create directory '" + target.parent_path().string() + "': " + ec.message());
        write_text_file(target, text);
        result.written.push_back(target);
        log(2, "wrote " + target.string());
    }
};

fs::path require_input(const fs::path& p) {
    require(fs::is_regular_file(p), ErrorKind::Io, "input file not found: " + p.string());
    return p;
}

TimeSeriesFrame load_frame(const Context& ctx) {
    const auto p = ctx.manifest.optional_path("frame").value_or(ctx.out / "frame.csv");
    return frame_from_csv(read_text_file(require_input(p)));
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* name_of(UnitRootTest t) { return t == UnitRootTest::Adf ? "ADF" : "PP"; }
const char* name_of(Deterministic d) { return d == Deterministic::Intercept ? "intercept" : "trend_and_intercept"; }
const char* name_of(SeriesTransform t) { return t == SeriesTransform::Level ? "level" : "first_difference"; }

json stats_json(const TimeSeriesFrame& frame) {
    json cols = json::object();
    for (const auto& name : frame.columns) {
        const auto v = frame.column(name);
        try {
            cols[name] = to_json(descriptive_stats(v));
        } catch (const Error& e) {
            cols[name] = {{"error", e.what()}};
        }
    }
    return {{"rows", frame.rows()},
            {"first_date", frame.rows() ? format_iso_date(frame.dates.front()) : ""},
            {"last_date", frame.rows() ? format_iso_date(frame.dates.back()) : ""},
            {"columns", cols}};
}

std::string stats_table(const json& stats) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-14s %14s %14s %14s %14s %10s %10s\n", "column", "mean", "max", "min", "std",
                  "kurtosis", "skewness");
    os << line;
    for (const auto& [name, s] : stats["columns"].items()) {
        if (s.contains("error")) {
            os << name << ": " << s["error"].get<std::string>() << "\n";
            continue;
        }
        std::snprintf(line, sizeof line, "%-14s %14.5f %14.5f %14.5f %14.5f %10.5f %10.5f\n", name.c_str(),
                      s["mean"].get<double>(), s["max"].get<double>(), s["min"].get<double>(),
                      s["std"].get<double>(), s["kurtosis"].get<double>(), s["skewness"].get<double>());
        os << line;
    }
    return os.str();
}

void cmd_ingest(Context& ctx) {
    const auto& m = ctx.manifest;
    const auto names = split_list(m.get_or("series", "crude_oil,dji,sp500,nasdaq"));
    require(!names.empty(), ErrorKind::Usage, "no price series listed");
    std::vector<fs::path> paths;
    for (const auto& n : names) {
        paths.push_back(require_input(m.path("ohlcv." + n)));
    }
    const auto cases_path = require_input(m.path("cases"));

    std::vector<PriceSeries> prices;
    json dropped = json::object();
    for (std::size_t i = 0; i < names.size(); ++i) {
        try {
            auto parsed = parse_ohlcv(read_text_file(paths[i]));
            dropped[names[i]] = parsed.dropped_rows;
            prices.push_back(close_prices(names[i], parsed.records));
        } catch (const Error& e) {
            throw Error(e.kind(), paths[i].string() + ": " + e.what());
        }
    }
    CaseSeries cases;
    try {
        cases = parse_jhu_cases(read_text_file(cases_path));
    } catch (const Error& e) {
        throw Error(e.kind(), cases_path.string() + ": " + e.what());
    }
    const auto frame = align(prices, cases);
    auto stats = stats_json(frame);
    stats["dropped_rows"] = dropped;

    ctx.write("frame.csv", frame_to_csv(frame));
    ctx.write("stats.json", stats.dump(2) + "\n");
    ctx.result.report = std::to_string(frame.rows()) + " aligned rows\n" + stats_table(stats);
}

void cmd_stats(Context& ctx) {
    const auto frame = load_frame(ctx);
    const auto stats = stats_json(frame);
    ctx.write("stats.json", stats.dump(2) + "\n");
    ctx.result.report = stats_table(stats);
}

void cmd_unitroot(Context& ctx) {
    const auto frame = load_frame(ctx);
    int max_lags = 31;
    if (auto v = ctx.manifest.get("max_lags")) {
        max_lags = static_cast<int>(parse_u64(*v, "max_lags"));
    }
    json vars = json::array();
    std::ostringstream report;
    for (const auto& name : frame.columns) {
        const auto series = frame.column(name);
        json cells = json::array();
        report << name << ":";
        for (const auto test : {UnitRootTest::Adf, UnitRootTest::PhillipsPerron}) {
            for (const auto transform : {SeriesTransform::Level, SeriesTransform::FirstDifference}) {
                for (const auto det : {Deterministic::Intercept, Deterministic::TrendAndIntercept}) {
                    UnitRootSpec spec;
                    spec.test = test;
                    spec.deterministic = det;
                    spec.transform = transform;
                    spec.max_lags = max_lags;
                    json cell = {{"test", name_of(test)}, {"deterministic", name_of(det)},
                                 {"transform", name_of(transform)}};
                    try {
                        const auto r = unit_root_test(series, spec);
                        cell.update(to_json(r));
                        report << " " << fmt(r.statistic) << parenthesized(r.lags_or_bandwidth)
                               << (r.reject_at[1] ? "*" : "");
                    } catch (const Error& e) {
                        cell["error"] = e.what();
                        report << " error";
                    }
                    cells.push_back(cell);
                }
            }
        }
        report << "\n";
        vars.push_back({{"variable", name}, {"cells", cells}});
    }
    const json doc = {{"observations", frame.rows()},
                      {"significance_levels", {"1%", "5%", "10%"}},
                      {"variables", vars}};
    ctx.write("unitroot.json", doc.dump(2) + "\n");
    ctx.result.report = report.str();
}

void cmd_decompose(Context& ctx) {
    const auto frame = load_frame(ctx);
    const int levels = pipeline_config(ctx.manifest).swt_levels;
    const auto filters = meyer_filters();
    for (const auto& name : frame.columns) {
        const auto coeffs = swt_decompose_padded(frame.column(name), filters, levels);
        std::string csv = "date,cA" + std::to_string(levels);
        for (int j = 1; j <= levels; ++j) {
            csv += ",cD" + std::to_string(j);
        }
        csv += "\n";
        for (std::size_t t = 0; t < frame.rows(); ++t) {
            csv += format_iso_date(frame.dates[t]) + "," + format_double(coeffs.approx[t]);
            for (const auto& d : coeffs.details) {
                csv += "," + format_double(d[t]);
            }
            csv += "\n";
        }
        ctx.write(fs::path("decompose") / (name + ".csv"), csv);
    }
    ctx.result.report = std::to_string(frame.cols()) + " columns decomposed to level " + std::to_string(levels) + "\n";
}

json trial_json(const TrialResult& t) {
    return {{"index", t.index},       {"seed", t.seed},   {"hyperparams", to_json(t.hyperparams)},
            {"rmse", t.rmse},         {"mae", t.mae},     {"failed", t.failed},
            {"failure", t.failure},   {"loss_trace", t.loss_trace}};
}

void cmd_train(Context& ctx) {
    const auto frame = load_frame(ctx);
    const auto config = pipeline_config(ctx.manifest);
    const auto hp = hyperparams(ctx.manifest);
    const auto data = prepare_data(frame, config);
    for (const auto& c : data.range_fallback) {
        log(1, "column '" + c + "' is constant on the training rows; scaled with its full-frame range");
    }
    log(1, "training " + hp.describe() + " on " + std::to_string(data.train.num_samples) + " windows");

    auto state = init_training(hp, config, data.train.num_features, config.seed);
    for (int e = 0; e < config.epochs; ++e) {
        train_epochs(state, data.train, config, 1);
        log(2, "epoch " + std::to_string(e + 1) + " loss " + fmt(state.loss_trace.back()));
    }
    const auto metrics = evaluate(state.model, data.test, data.scaler, config.units);

    Checkpoint ckpt;
    ckpt.model = state.model;
    ckpt.optimizer = state.optimizer;
    ckpt.rng_seed = config.seed;
    ckpt.rng_state = state.rng.state();
    ckpt.pipeline = {{"config", to_json(config)},
                     {"hyperparams", to_json(hp)},
                     {"scaler", to_json(data.scaler)},
                     {"features", data.feature_names},
                     {"range_fallback", data.range_fallback}};
    ctx.write("model.json", checkpoint_to_string(ckpt));

    const json report = {{"seed", config.seed},
                         {"mode", to_string(config.mode)},
                         {"target", config.target},
                         {"units", to_string(config.units)},
                         {"hyperparams", to_json(hp)},
                         {"train_samples", data.train.num_samples},
                         {"test_samples", data.test.num_samples},
                         {"features", data.feature_names.size()},
                         {"rmse", metrics.rmse},
                         {"mae", metrics.mae},
                         {"loss_trace", state.loss_trace}};
    ctx.write("train.json", report.dump(2) + "\n");
    ctx.result.report = "test RMSE " + fmt(metrics.rmse) + ", MAE " + fmt(metrics.mae) + " (" +
                        to_string(config.units) + ")\n";
}

void cmd_gridsearch(Context& ctx) {
    const auto frame = load_frame(ctx);
    const auto config = pipeline_config(ctx.manifest);
    const auto space = grid_space(ctx.manifest);
    const auto budget = parse_grid_budget(ctx.manifest.get_or("budget", "full"));
    const auto data = prepare_data(frame, config);
    log(1, "grid of " + std::to_string(space.size()) + " points, budget " + to_string(budget));

    const auto result = grid_search(space, data, config, budget, ctx.threads, [](const TrialResult& t) {
        log(1, "trial " + std::to_string(t.index) + (t.failed ? " failed: " + t.failure : " rmse " + fmt(t.rmse)));
    });

    json trials = json::array();
    for (const auto& t : result.trials) {
        trials.push_back(trial_json(t));
    }
    const json doc = {{"run_seed", config.seed},
                      {"budget", to_string(budget)},
                      {"space_size", space.size()},
                      {"config", to_json(config)},
                      {"trials", trials}};
    ctx.write("trials.json", doc.dump(2) + "\n");

    std::string csv = "rank,index,bdlstm,fc,activation,optimizer,learning_rate,decay,l2,rmse,mae\n";
    auto sizes = [](const std::vector<int>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "-" : "") + std::to_string(v[i]);
        return s;
    };
    for (std::size_t r = 0; r < result.ranking.size(); ++r) {
        const auto& t = result.trials[result.ranking[r]];
        const auto& hp = t.hyperparams;
        csv += std::to_string(r + 1) + "," + std::to_string(t.index) + "," + sizes(hp.bdlstm_sizes) + "," +
               sizes(hp.fc_sizes) + "," + to_string(hp.activation) + "," + to_string(hp.optimizer) + "," +
               format_double(hp.learning_rate) + "," + format_double(hp.decay) + "," + format_double(hp.l2) + "," +
               format_double(t.rmse) + "," + format_double(t.mae) + "\n";
    }
    ctx.write("ranking.csv", csv);

    std::string timings = "index,wall_time_s\n";
    for (const auto& t : result.trials) {
        timings += std::to_string(t.index) + "," + fmt(t.wall_time) + "\n";
    }
    ctx.write("timings.csv", timings);

    std::ostringstream report;
    report << result.trials.size() << " trials, " << result.trials.size() - result.ranking.size() << " failed\n";
    if (!result.ranking.empty()) {
        const auto& best = result.trials[result.ranking.front()];
        report << "best: " << best.hyperparams.describe() << " rmse " << fmt(best.rmse) << " mae " << fmt(best.mae)
               << "\n";
    }
    ctx.result.report = report.str();
}

void cmd_forecast(Context& ctx) {
    const auto model_path = require_input(ctx.manifest.optional_path("model").value_or(ctx.out / "model.json"));
    const auto ckpt = load_checkpoint(model_path);
    require(ckpt.pipeline.is_object() && ckpt.pipeline.contains("config") && ckpt.pipeline.contains("scaler"),
            ErrorKind::Format, model_path.string() + ": checkpoint carries no pipeline section");
    const auto config = config_from_json(ckpt.pipeline["config"]);
    const auto scaler = scaler_from_json(ckpt.pipeline["scaler"]);
    const auto frame = load_frame(ctx);
    require(frame.columns == scaler.columns, ErrorKind::Data, "frame columns do not match the trained model");

    const auto fc = forecast(ckpt.model, frame, scaler, config);
    std::string csv = "date,predicted_price\n";
    std::string report;
    for (std::size_t i = 0; i < fc.dates.size(); ++i) {
        csv += format_iso_date(fc.dates[i]) + "," + format_double(fc.price[i]) + "\n";
        report += format_iso_date(fc.dates[i]) + "  " + fmt(fc.price[i]) + "\n";
    }
    ctx.write("forecast.csv", csv);
    ctx.result.report = report;
}

void cmd_compare(Context& ctx) {
    const auto frame = load_frame(ctx);
    auto config = pipeline_config(ctx.manifest);
    if (!ctx.manifest.has("horizon")) {
        config.horizon = 1;
    }
    const auto hp = hyperparams(ctx.manifest);
    const auto seeds = ctx.manifest.has("seeds") ? parse_seed_list(*ctx.manifest.get("seeds"))
                                                 : std::vector<std::uint64_t>{config.seed};
    const auto targets = split_list(ctx.manifest.get_or("compare.targets", config.target));
    std::vector<InputMode> modes;
    for (const auto& m : split_list(ctx.manifest.get_or("compare.modes", "RAW,WT_AD,WT_ADA"))) {
        modes.push_back(parse_input_mode(m));
    }
    log(1, "comparing " + std::to_string(targets.size() * modes.size()) + " configurations over " +
               std::to_string(seeds.size()) + " seeds");
    const auto report = compare_configurations(frame, hp, seeds, config, targets, modes, ctx.threads);

    auto summary = [](const ComparisonCell& c, bool use_rmse) {
        const auto& pick = [&](const Metrics& m) { return use_rmse ? m.rmse : m.mae; };
        return json{{"median", pick(c.median)},
                    {"min", pick(c.min)},
                    {"max", pick(c.max)},
                    {"per_seed", use_rmse ? c.rmse : c.mae}};
    };
    json rows = json::array();
    std::ostringstream text;
    for (const auto& target : targets) {
        json cells = json::object();
        text << target << ":";
        for (const auto& c : report.cells) {
            if (c.target != target) continue;
            cells[to_string(c.mode)] = {{"rmse", summary(c, true)}, {"mae", summary(c, false)}, {"failures", c.failures}};
            text << " " << to_string(c.mode) << " rmse " << fmt(c.median.rmse) << " mae " << fmt(c.median.mae) << ";";
        }
        text << "\n";
        rows.push_back({{"target", target}, {"modes", cells}});
    }
    const json doc = {{"hyperparams", to_json(hp)},
                      {"config", to_json(config)},
                      {"seeds", seeds},
                      {"statistic", "median over seeds"},
                      {"targets", rows}};
    ctx.write("comparison.json", doc.dump(2) + "\n");
    ctx.result.report = text.str();
}

}  // namespace

void set_verbosity(int level) { g_verbosity = level; }
int verbosity() { return g_verbosity.load(); }

std::string parenthesized(int k) { return "(" + std::to_string(k) + ")"; }

json to_json(const PipelineConfig& c) {
    return {{"mode", to_string(c.mode)},
            {"lookback", c.lookback},
            {"horizon", c.horizon},
            {"target", c.target},
            {"train_fraction", c.train_fraction},
            {"epochs", c.epochs},
            {"batch_size", c.batch_size},
            {"seed", c.seed},
            {"dropout", c.dropout},
            {"swt_levels", c.swt_levels},
            {"scope", to_string(c.scope)},
            {"units", to_string(c.units)},
            {"shuffle", c.shuffle}};
}

PipelineConfig config_from_json(const json& j) {
    try {
        PipelineConfig c;
        c.mode = parse_input_mode(j.at("mode").get<std::string>());
        c.lookback = j.at("lookback").get<std::size_t>();
        c.horizon = j.at("horizon").get<std::size_t>();
        c.target = j.at("target").get<std::string>();
        c.train_fraction = j.at("train_fraction").get<double>();
        c.epochs = j.at("epochs").get<int>();
        c.batch_size = j.at("batch_size").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.dropout = j.at("dropout").get<std::vector<double>>();
        c.swt_levels = j.at("swt_levels").get<int>();
        c.scope = parse_swt_scope(j.at("scope").get<std::string>());
        c.units = parse_metric_units(j.at("units").get<std::string>());
        c.shuffle = j.at("shuffle").get<bool>();
        c.validate();
        return c;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed pipeline config: ") + e.what());
    }
}

json to_json(const HyperParams& hp) {
    return {{"bdlstm", hp.bdlstm_sizes},          {"fc", hp.fc_sizes},
            {"activation", to_string(hp.activation)}, {"optimizer", to_string(hp.optimizer)},
            {"learning_rate", hp.learning_rate},  {"decay", hp.decay},
            {"l2", hp.l2}};
}

json to_json(const ScalerParams& s) { return {{"columns", s.columns}, {"min", s.min}, {"max", s.max}}; }

ScalerParams scaler_from_json(const json& j) {
    try {
        ScalerParams s;
        s.columns = j.at("columns").get<std::vector<std::string>>();
        s.min = j.at("min").get<std::vector<double>>();
        s.max = j.at("max").get<std::vector<double>>();
        require(s.columns.size() == s.min.size() && s.min.size() == s.max.size() && !s.columns.empty(),
                ErrorKind::Format, "malformed scaler");
        for (std::size_t i = 0; i < s.min.size(); ++i) {
            require(s.max[i] > s.min[i], ErrorKind::Format, "malformed scaler range for '" + s.columns[i] + "'");
        }
        return s;
    } catch (const json::exception& e) {
        fail(ErrorKind::Format, std::string("malformed scaler: ") + e.what());
    }
}

json to_json(const DescriptiveStats& s) {
    return {{"mean", s.mean},         {"max", s.max},           {"min", s.min}, {"std", s.std_dev},
            {"kurtosis", s.kurtosis}, {"skewness", s.skewness}, {"n", s.n}};
}

json to_json(const UnitRootResult& r) {
    return {{"statistic", r.statistic},
            {"lags_or_bandwidth", r.lags_or_bandwidth},
            {"lag_label", parenthesized(r.lags_or_bandwidth)},
            {"critical_values", {{"1%", r.critical_values[0]}, {"5%", r.critical_values[1]}, {"10%", r.critical_values[2]}}},
            {"reject", {{"1%", r.reject_at[0]}, {"5%", r.reject_at[1]}, {"10%", r.reject_at[2]}}},
            {"observations", r.observations},
            {"asymptotic_only", r.asymptotic_only}};
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"ingest", "stats",      "unitroot", "decompose",
                                                   "train",  "gridsearch", "forecast", "compare"};
    return names;
}

CommandResult run_command(std::string_view command, const Manifest& manifest) {
    const auto out = manifest.optional_path("out");
    require(out.has_value(), ErrorKind::Usage, "no output directory given (--out or manifest 'out')");
    Context ctx{manifest, *out, 1, {}};
    if (auto v = manifest.get("threads")) {
        ctx.threads = static_cast<unsigned>(std::max<std::uint64_t>(1, parse_u64(*v, "threads")));
    }
    if (command == "ingest") cmd_ingest(ctx);
    else if (command == "stats") cmd_stats(ctx);
    else if (command == "unitroot") cmd_unitroot(ctx);
    else if (command == "decompose") cmd_decompose(ctx);
    else if (command == "train") cmd_train(ctx);
    else if (command == "gridsearch") cmd_gridsearch(ctx);
    else if (command == "forecast") cmd_forecast(ctx);
    else if (command == "compare") cmd_compare(ctx);
    else fail(ErrorKind::Usage, "unknown command '" + std::string(command) + "'");
    for (const auto& p : ctx.result.written) {
        ctx.result.report += "wrote " + p.string() + "\n";
    }
    return std::move(ctx.result);
}

}  // namespace wavecast
