#include "wavecast/trainer.hpp"

#include "wavecast/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace wavecast {

InputMode parse_input_mode(std::string_view name) {
    std::string key(name);
    for (auto& ch : key) {
        ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    }
    if (key == "RAW") return InputMode::Raw;
    if (key == "WT_AD") return InputMode::WtAd;
    if (key == "WT_ADA") return InputMode::WtAda;
    fail(ErrorKind::Usage, "unknown mode '" + std::string(name) + "' (expected RAW, WT_AD or WT_ADA)");
}

const char* to_string(InputMode mode) {
    switch (mode) {
    case InputMode::Raw: return "RAW";
    case InputMode::WtAd: return "WT_AD";
    case InputMode::WtAda: return "WT_ADA";
    }
    return "RAW";
}

SwtScope parse_swt_scope(std::string_view name) {
    if (name == "partition") return SwtScope::Partition;
    if (name == "full") return SwtScope::Full;
    fail(ErrorKind::Usage, "unknown swt scope '" + std::string(name) + "' (expected partition or full)");
}

const char* to_string(SwtScope scope) { return scope == SwtScope::Partition ? "partition" : "full"; }

MetricUnits parse_metric_units(std::string_view name) {
    if (name == "scaled") return MetricUnits::Scaled;
    if (name == "price") return MetricUnits::Price;
    fail(ErrorKind::Usage, "unknown metric units '" + std::string(name) + "' (expected scaled or price)");
}

const char* to_string(MetricUnits units) { return units == MetricUnits::Scaled ? "scaled" : "price"; }

namespace {

std::string join_sizes(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "-" : "") + std::to_string(v[i]);
    }
    return s;
}

}  // namespace

std::string HyperParams::describe() const {
    std::ostringstream os;
    os << "bdlstm=" << join_sizes(bdlstm_sizes) << " fc=" << join_sizes(fc_sizes) << " act=" << to_string(activation)
       << " opt=" << to_string(optimizer) << " lr=" << learning_rate << " decay=" << decay << " l2=" << l2;
    return os.str();
}

void PipelineConfig::validate() const {
    require(lookback >= 1, ErrorKind::Usage, "lookback must be at least 1");
    require(horizon >= 1, ErrorKind::Usage, "horizon must be at least 1");
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::Usage, "train_fraction must be in (0, 1)");
    require(epochs >= 0, ErrorKind::Usage, "epochs must be non-negative");
    require(batch_size >= 1, ErrorKind::Usage, "batch_size must be at least 1");
    require(swt_levels >= 1 && swt_levels <= 16, ErrorKind::Usage, "swt_levels must be in [1, 16]");
    require(!target.empty(), ErrorKind::Usage, "target column is empty");
    for (const double p : dropout) {
        require(p >= 0.0 && p < 1.0, ErrorKind::Usage, "dropout rates must be in [0, 1)");
    }
}

double mae(std::span<const double> y, std::span<const double> y_hat) {
    require(y.size() == y_hat.size(), ErrorKind::Usage, "mae: length mismatch");
    require(!y.empty(), ErrorKind::Usage, "mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        sum += std::abs(y[i] - y_hat[i]);
    }
    return sum / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> y_hat) {
    require(y.size() == y_hat.size(), ErrorKind::Usage, "rmse: length mismatch");
    require(!y.empty(), ErrorKind::Usage, "rmse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double e = y[i] - y_hat[i];
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(y.size()));
}

FeatureMatrix build_features(const TimeSeriesFrame& scaled, const PipelineConfig& config) {
    if (config.mode == InputMode::Raw) {
        return {scaled.values, scaled.columns};
    }
    static const FilterPair filters = meyer_filters();
    const auto mode = config.mode == InputMode::WtAd ? WaveletFeatures::AD : WaveletFeatures::ADA;
    return decompose_frame(scaled, config.swt_levels, mode, filters);
}

WindowedDataset build_dataset(const TimeSeriesFrame& scaled, const PipelineConfig& config) {
    const auto features = build_features(scaled, config);
    const auto target = scaled.column(config.target);
    return make_windows(features.values, target, config.lookback, config.horizon, config.target);
}

ScalerParams fit_training_scaler(const TimeSeriesFrame& frame, std::size_t train_rows, const std::string& target,
                                 std::vector<std::string>* fallback) {
    require(train_rows >= 1 && train_rows <= frame.rows(), ErrorKind::Usage, "training rows out of range");
    (void)frame.column_index(target);
    ScalerParams p;
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& name = frame.columns[c];
        const auto col = frame.values.col(static_cast<Eigen::Index>(c));
        double lo = col.head(static_cast<Eigen::Index>(train_rows)).minCoeff();
        double hi = col.head(static_cast<Eigen::Index>(train_rows)).maxCoeff();
        if (!(hi > lo)) {
            require(name != target, ErrorKind::Data, "target column '" + name + "' is constant on the training rows");
            lo = col.minCoeff();
            hi = col.maxCoeff();
            require(hi > lo, ErrorKind::Data, "cannot scale constant column '" + name + "'");
            if (fallback) {
                fallback->push_back(name);
            }
        }
        p.columns.push_back(name);
        p.min.push_back(lo);
        p.max.push_back(hi);
    }
    return p;
}

PreparedData prepare_data(const TimeSeriesFrame& frame, const PipelineConfig& config) {
    config.validate();
    const std::size_t min_rows = config.lookback + config.horizon;
    const auto [train_raw, test_raw] = chronological_split(frame, config.train_fraction, min_rows);

    PreparedData out;
    out.scaler = fit_training_scaler(frame, train_raw.rows(), config.target, &out.range_fallback);
    const auto scaled = apply_scaler(out.scaler, frame);

    if (config.scope == SwtScope::Full) {
        const auto features = build_features(scaled, config);
        const auto target = scaled.column(config.target);
        const auto n_train = static_cast<Eigen::Index>(train_raw.rows());
        const auto n_test = static_cast<Eigen::Index>(test_raw.rows());
        out.feature_names = features.names;
        out.train = make_windows(features.values.topRows(n_train),
                                 std::span<const double>(target).first(static_cast<std::size_t>(n_train)),
                                 config.lookback, config.horizon, config.target);
        out.test = make_windows(features.values.bottomRows(n_test),
                                std::span<const double>(target).subspan(static_cast<std::size_t>(n_train)),
                                config.lookback, config.horizon, config.target);
        return out;
    }

    const auto train = scaled.slice_rows(0, train_raw.rows());
    const auto test = scaled.slice_rows(train_raw.rows(), test_raw.rows());
    const auto train_features = build_features(train, config);
    out.feature_names = train_features.names;
    out.train = make_windows(train_features.values, train.column(config.target), config.lookback, config.horizon,
                             config.target);
    out.test = build_dataset(test, config);
    return out;
}

ModelSpec model_spec(const HyperParams& hp, const PipelineConfig& config, std::size_t num_features) {
    require(!hp.bdlstm_sizes.empty(), ErrorKind::Usage, "at least one BDLSTM layer is required");
    ModelSpec s;
    s.input_size = static_cast<Eigen::Index>(num_features);
    s.bdlstm_sizes = hp.bdlstm_sizes;
    s.dropout = config.dropout;
    s.fc_sizes = hp.fc_sizes;
    s.activation = hp.activation;
    s.horizon = static_cast<Eigen::Index>(config.horizon);
    s.l2 = hp.l2;
    return s;
}

SequenceBatch gather_inputs(const WindowedDataset& data, std::span<const std::size_t> samples) {
    const auto F = static_cast<Eigen::Index>(data.num_features);
    const auto B = static_cast<Eigen::Index>(samples.size());
    SequenceBatch batch(data.lookback, Eigen::MatrixXd(F, B));
    for (Eigen::Index b = 0; b < B; ++b) {
        const std::size_t s = samples[static_cast<std::size_t>(b)];
        require(s < data.num_samples, ErrorKind::Usage, "sample index out of range");
        for (std::size_t t = 0; t < data.lookback; ++t) {
            batch[t].col(b) = Eigen::Map<const Eigen::VectorXd>(&data.inputs[(s * data.lookback + t) * data.num_features], F);
        }
    }
    return batch;
}

Eigen::MatrixXd gather_targets(const WindowedDataset& data, std::span<const std::size_t> samples) {
    Eigen::MatrixXd y(static_cast<Eigen::Index>(data.horizon), static_cast<Eigen::Index>(samples.size()));
    for (std::size_t b = 0; b < samples.size(); ++b) {
        for (std::size_t h = 0; h < data.horizon; ++h) {
            y(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(b)) = data.target(samples[b], h);
        }
    }
    return y;
}

TrainingState init_training(const HyperParams& hp, const PipelineConfig& config, std::size_t num_features,
                            std::uint64_t seed) {
    TrainingState s{.model = {}, .optimizer = {}, .rng = Rng(seed), .loss_trace = {}};
    s.model = init_model(model_spec(hp, config, num_features), s.rng);
    s.optimizer.kind = hp.optimizer;
    s.optimizer.learning_rate = hp.learning_rate;
    s.optimizer.decay = hp.decay;
    return s;
}

void train_epochs(TrainingState& state, const WindowedDataset& train, const PipelineConfig& config, int epochs) {
    require(train.num_samples > 0, ErrorKind::Data, "no training samples");
    require(static_cast<Eigen::Index>(train.num_features) == state.model.input_size() &&
                static_cast<Eigen::Index>(train.horizon) == state.model.horizon(),
            ErrorKind::Usage, "dataset shape does not match the model");
    std::vector<std::size_t> order(train.num_samples);
    for (int e = 0; e < epochs; ++e) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        if (config.shuffle) {
            for (std::size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[state.rng.below(i)]);
            }
        }
        double weighted = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t count = std::min(config.batch_size, order.size() - start);
            const std::span<const std::size_t> idx(order.data() + start, count);
            const auto inputs = gather_inputs(train, idx);
            const auto targets = gather_targets(train, idx);
            auto lg = loss_and_gradients(state.model, inputs, targets, &state.rng);
            require(std::isfinite(lg.loss), ErrorKind::Numeric, "training loss diverged");
            optimizer_step(state.optimizer, state.model, lg.gradients);
            weighted += lg.loss * static_cast<double>(count);
        }
        state.loss_trace.push_back(weighted / static_cast<double>(order.size()));
    }
}

Eigen::MatrixXd predict(const BdLstmModel& model, const WindowedDataset& data) {
    constexpr std::size_t kChunk = 256;
    Eigen::MatrixXd out(model.horizon(), static_cast<Eigen::Index>(data.num_samples));
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.num_samples; start += kChunk) {
        const std::size_t count = std::min(kChunk, data.num_samples - start);
        idx.resize(count);
        std::iota(idx.begin(), idx.end(), start);
        out.middleCols(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(count)) =
            forward_batch(model, gather_inputs(data, idx), false, nullptr, nullptr);
    }
    return out;
}

Metrics evaluate(const BdLstmModel& model, const WindowedDataset& data, const ScalerParams& scaler,
                 MetricUnits units) {
    require(data.num_samples > 0, ErrorKind::Data, "no evaluation samples");
    const Eigen::MatrixXd pred = predict(model, data);
    std::vector<double> y, y_hat;
    y.reserve(data.targets.size());
    y_hat.reserve(data.targets.size());
    for (std::size_t s = 0; s < data.num_samples; ++s) {
        for (std::size_t h = 0; h < data.horizon; ++h) {
            double a = data.target(s, h);
            double b = pred(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(s));
            if (units == MetricUnits::Price) {
                a = invert_value(scaler, data.target_column, a);
                b = invert_value(scaler, data.target_column, b);
            }
            y.push_back(a);
            y_hat.push_back(b);
        }
    }
    Metrics m{rmse(y, y_hat), mae(y, y_hat)};
    // Quadratic mean dominates the mean absolute error; allow for rounding only.
    require(m.rmse >= m.mae * (1.0 - 1e-12), ErrorKind::Numeric, "metric invariant violated: RMSE < MAE");
    return m;
}

TrainedTrial train_and_evaluate(const HyperParams& hp, const PreparedData& data, const PipelineConfig& config,
                                std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    TrainedTrial out;
    out.result.hyperparams = hp;
    out.result.seed = seed;
    try {
        auto state = init_training(hp, config, data.train.num_features, seed);
        train_epochs(state, data.train, config, config.epochs);
        const auto m = evaluate(state.model, data.test, data.scaler, config.units);
        out.result.rmse = m.rmse;
        out.result.mae = m.mae;
        out.result.loss_trace = state.loss_trace;
        out.state = std::move(state);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numeric) {
            throw;
        }
        out.result.failed = true;
        out.result.failure = e.what();
        out.result.rmse = std::numeric_limits<double>::quiet_NaN();
        out.result.mae = std::numeric_limits<double>::quiet_NaN();
    }
    out.result.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

std::size_t GridSpace::size() const {
    return bdlstm_sizes.size() * fc_sizes.size() * activations.size() * optimizers.size() * learning_rates.size() *
           decays.size() * l2s.size();
}

HyperParams GridSpace::at(std::size_t index) const {
    require(index < size(), ErrorKind::Usage,
            "grid index " + std::to_string(index) + " out of range (size " + std::to_string(size()) + ")");
    HyperParams hp;
    auto take = [&index](std::size_t radix) {
        const std::size_t digit = index % radix;
        index /= radix;
        return digit;
    };
    hp.l2 = l2s[take(l2s.size())];
    hp.decay = decays[take(decays.size())];
    hp.learning_rate = learning_rates[take(learning_rates.size())];
    hp.optimizer = optimizers[take(optimizers.size())];
    hp.activation = activations[take(activations.size())];
    hp.fc_sizes = fc_sizes[take(fc_sizes.size())];
    hp.bdlstm_sizes = bdlstm_sizes[take(bdlstm_sizes.size())];
    return hp;
}

GridSpace default_grid_space() {
    GridSpace s;
    s.bdlstm_sizes = {{32}, {64}, {32, 32}, {64, 32}, {64, 64}, {32, 32, 32}, {64, 32, 32}, {64, 32, 64}, {64, 64, 64}};
    s.fc_sizes = {{12}, {24}, {12, 12}, {24, 12}, {24, 24}, {12, 12, 12}, {24, 12, 12}, {24, 12, 24}, {24, 24, 24}};
    s.activations = {Activation::Relu, Activation::Elu, Activation::Tanh, Activation::Identity};
    s.optimizers = {OptimizerKind::Adam, OptimizerKind::RmsProp};
    s.learning_rates = {0.0001, 0.001, 0.01};
    s.decays = {1e-7, 1e-6, 1e-5};
    s.l2s = {0.0001, 0.001, 0.01};
    return s;
}

GridSpace point_space(const HyperParams& hp) {
    GridSpace s;
    s.bdlstm_sizes = {hp.bdlstm_sizes};
    s.fc_sizes = {hp.fc_sizes};
    s.activations = {hp.activation};
    s.optimizers = {hp.optimizer};
    s.learning_rates = {hp.learning_rate};
    s.decays = {hp.decay};
    s.l2s = {hp.l2};
    return s;
}

namespace {

std::size_t parse_index(std::string_view text, std::string_view what) {
    text = trim(text);
    std::size_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    require(!text.empty() && ec == std::errc() && ptr == end, ErrorKind::Usage,
            "invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

}  // namespace

GridBudget parse_grid_budget(std::string_view text) {
    text = trim(text);
    GridBudget b;
    if (text == "full") {
        return b;
    }
    if (text.starts_with("random_")) {
        b.kind = GridBudget::Kind::Random;
        b.count = parse_index(text.substr(7), "random budget size");
        require(b.count >= 1, ErrorKind::Usage, "random budget size must be at least 1");
        return b;
    }
    if (text.starts_with("fixed:")) {
        b.kind = GridBudget::Kind::Fixed;
        std::string_view rest = text.substr(6);
        while (true) {
            const auto comma = rest.find(',');
            b.indices.push_back(parse_index(rest.substr(0, comma), "grid index"));
            if (comma == std::string_view::npos) {
                break;
            }
            rest = rest.substr(comma + 1);
        }
        return b;
    }
    fail(ErrorKind::Usage, "unknown grid budget '" + std::string(text) + "' (expected full, random_<k> or fixed:<i>,...)");
}

std::string to_string(const GridBudget& budget) {
    switch (budget.kind) {
    case GridBudget::Kind::Full: return "full";
    case GridBudget::Kind::Random: return "random_" + std::to_string(budget.count);
    case GridBudget::Kind::Fixed: {
        std::string s = "fixed:";
        for (std::size_t i = 0; i < budget.indices.size(); ++i) {
            s += (i ? "," : "") + std::to_string(budget.indices[i]);
        }
        return s;
    }
    }
    return "full";
}

std::vector<std::size_t> select_trials(const GridSpace& space, const GridBudget& budget, std::uint64_t run_seed) {
    const std::size_t n = space.size();
    require(n > 0, ErrorKind::Usage, "hyperparameter space is empty");
    std::vector<std::size_t> out;
    switch (budget.kind) {
    case GridBudget::Kind::Full:
        out.resize(n);
        std::iota(out.begin(), out.end(), std::size_t{0});
        break;
    case GridBudget::Kind::Random: {
        require(budget.count <= n, ErrorKind::Usage,
                "random budget " + std::to_string(budget.count) + " exceeds space size " + std::to_string(n));
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        Rng rng(mix_seed(run_seed ^ 0x6a09e667f3bcc908ULL));
        for (std::size_t i = 0; i < budget.count; ++i) {
            std::swap(pool[i], pool[i + rng.below(n - i)]);
        }
        out.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(budget.count));
        std::sort(out.begin(), out.end());
        break;
    }
    case GridBudget::Kind::Fixed: {
        require(!budget.indices.empty(), ErrorKind::Usage, "fixed budget lists no indices");
        out = budget.indices;
        auto sorted = out;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::Usage,
                "fixed budget repeats an index");
        require(sorted.back() < n, ErrorKind::Usage,
                "grid index " + std::to_string(sorted.back()) + " out of range (size " + std::to_string(n) + ")");
        break;
    }
    }
    return out;
}

std::vector<std::size_t> rank_trials(const std::vector<TrialResult>& trials) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < trials.size(); ++i) {
        if (!trials[i].failed) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = trials[a];
        const auto& y = trials[b];
        if (x.rmse != y.rmse) return x.rmse < y.rmse;
        if (x.mae != y.mae) return x.mae < y.mae;
        return x.index < y.index;
    });
    return order;
}

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t n, unsigned threads, Job&& job) {
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace

GridResult grid_search(const GridSpace& space, const PreparedData& data, const PipelineConfig& config,
                       const GridBudget& budget, unsigned threads, const TrialCallback& on_trial) {
    const auto selected = select_trials(space, budget, config.seed);
    GridResult out;
    out.trials.resize(selected.size());
    std::mutex callback_mutex;
    parallel_for(selected.size(), threads, [&](std::size_t i) {
        const std::size_t index = selected[i];
        auto trial = train_and_evaluate(space.at(index), data, config, derive_seed(config.seed, index));
        trial.result.index = index;
        out.trials[i] = std::move(trial.result);
        if (on_trial) {
            std::lock_guard lock(callback_mutex);
            on_trial(out.trials[i]);
        }
    });
    out.ranking = rank_trials(out.trials);
    return out;
}

std::vector<Date> next_business_days(Date last, std::size_t count) {
    std::vector<Date> out;
    Date d = last;
    while (out.size() < count) {
        d += std::chrono::days{1};
        const std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
            out.push_back(d);
        }
    }
    return out;
}

ForecastReport forecast_with(const Predictor& predict_fn, const TimeSeriesFrame& frame, const ScalerParams& scaler,
                             const PipelineConfig& config) {
    require(frame.rows() >= config.lookback, ErrorKind::Data,
            "forecast needs " + std::to_string(config.lookback) + " rows of history, frame has " +
                std::to_string(frame.rows()));
    require(scaler.fitted(), ErrorKind::State, "scaler has not been fitted");
    const auto scaled = apply_scaler(scaler, frame);
    const auto features = build_features(scaled, config);
    const auto L = static_cast<Eigen::Index>(config.lookback);
    const Eigen::MatrixXd window = features.values.bottomRows(L);
    const Eigen::VectorXd out = predict_fn(window);
    require(out.size() == static_cast<Eigen::Index>(config.horizon), ErrorKind::Usage,
            "predictor returned " + std::to_string(out.size()) + " values, expected " +
                std::to_string(config.horizon));
    require(out.allFinite(), ErrorKind::Numeric, "forecast is not finite");

    ForecastReport r;
    r.dates = next_business_days(frame.dates.back(), config.horizon);
    for (Eigen::Index h = 0; h < out.size(); ++h) {
        r.scaled.push_back(out(h));
        r.price.push_back(invert_value(scaler, config.target, out(h)));
    }
    return r;
}

ForecastReport forecast(const BdLstmModel& model, const TimeSeriesFrame& frame, const ScalerParams& scaler,
                        const PipelineConfig& config) {
    return forecast_with([&](const Eigen::MatrixXd& w) { return model_forward(model, w); }, frame, scaler, config);
}

double median(std::vector<double> values) {
    require(!values.empty(), ErrorKind::Usage, "median of an empty set");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ComparisonReport compare_configurations(const TimeSeriesFrame& frame, const HyperParams& hp,
                                        const std::vector<std::uint64_t>& seeds, const PipelineConfig& base,
                                        const std::vector<std::string>& targets,
                                        const std::vector<InputMode>& modes, unsigned threads) {
    require(!seeds.empty(), ErrorKind::Usage, "at least one seed is required");
    require(!targets.empty() && !modes.empty(), ErrorKind::Usage, "no targets or modes to compare");

    ComparisonReport report;
    std::vector<PreparedData> prepared;
    std::vector<PipelineConfig> configs;
    for (const auto& target : targets) {
        for (const auto mode : modes) {
            PipelineConfig cfg = base;
            cfg.target = target;
            cfg.mode = mode;
            configs.push_back(cfg);
            prepared.push_back(prepare_data(frame, cfg));
            ComparisonCell cell;
            cell.target = target;
            cell.mode = mode;
            cell.seeds = seeds;
            cell.rmse.resize(seeds.size());
            cell.mae.resize(seeds.size());
            report.cells.push_back(std::move(cell));
        }
    }

    const std::size_t jobs = report.cells.size() * seeds.size();
    parallel_for(jobs, threads, [&](std::size_t j) {
        const std::size_t c = j / seeds.size();
        const std::size_t s = j % seeds.size();
        const auto trial = train_and_evaluate(hp, prepared[c], configs[c], seeds[s]);
        report.cells[c].rmse[s] = trial.result.rmse;
        report.cells[c].mae[s] = trial.result.mae;
    });

    for (auto& cell : report.cells) {
        std::vector<double> r, m;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            if (std::isfinite(cell.rmse[s])) {
                r.push_back(cell.rmse[s]);
                m.push_back(cell.mae[s]);
            } else {
                ++cell.failures;
            }
        }
        if (r.empty()) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            cell.median = cell.min = cell.max = {nan, nan};
            continue;
        }
        cell.median = {median(r), median(m)};
        cell.min = {*std::min_element(r.begin(), r.end()), *std::min_element(m.begin(), m.end())};
        cell.max = {*std::max_element(r.begin(), r.end()), *std::max_element(m.begin(), m.end())};
    }
    return report;
}

}  // namespace wavecast
