// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Reuses the test-side data generators without the doctest runtime.
#define DOCTEST_CONFIG_DISABLE
#include "../unit/helpers.hpp"

#include "wavecast/ingest.hpp"
#include "wavecast/network.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/stationarity.hpp"
#include "wavecast/swt.hpp"
#include "wavecast/trainer.hpp"

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

using namespace wavecast;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

unsigned worker_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---- 1
Outcome swt_reconstruction() {
    const auto filters = meyer_filters();
    Rng rng(1);
    const std::size_t lengths[] = {64, 128, 256, 512, 1024};
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto x = testing::uniform_vector(rng, lengths[i % 5], -10.0, 10.0);
        const auto back = iswt_reconstruct(swt_decompose(x, filters, 5), filters);
        for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(back[k] - x[k]));
    }
    return {worst < 1e-6, "max |x - ISWT(SWT(x))| = " + fmt("%.3g", worst)};
}

// ---- 2
Outcome swt_shift_invariance() {
    const auto filters = meyer_filters();
    Rng rng(2);
    const auto x = testing::uniform_vector(rng, 256);
    const auto base = swt_decompose(x, filters, 5);
    double worst = 0.0;
    for (const std::size_t k : {1, 7, 32, 255}) {
        std::vector<double> shifted(256);
        for (std::size_t n = 0; n < 256; ++n) shifted[n] = x[(n + k) % 256];
        const auto c = swt_decompose(shifted, filters, 5);
        auto compare = [&](const std::vector<double>& rotated, const std::vector<double>& original) {
            for (std::size_t n = 0; n < 256; ++n) worst = std::max(worst, std::abs(rotated[n] - original[(n + k) % 256]));
        };
        compare(c.approx, base.approx);
        for (int j = 0; j < 5; ++j) compare(c.details[j], base.details[j]);
    }
    return {worst < 1e-12, "max coefficient difference " + fmt("%.3g", worst)};
}

// ---- 3
Outcome meyer_invariants() {
    const auto f = meyer_filters();
    const double lo_sum = std::accumulate(f.lowpass.begin(), f.lowpass.end(), 0.0);
    const double hi_sum = std::accumulate(f.highpass.begin(), f.highpass.end(), 0.0);
    double norm2 = 0.0;
    for (const double v : f.lowpass) norm2 += v * v;
    const double norm = std::sqrt(norm2);
    double worst_v = std::max(std::abs(meyer_auxiliary(0.0)), std::abs(meyer_auxiliary(1.0) - 1.0));
    for (int i = 0; i <= 1000; ++i) {
        const double a = i / 1000.0;
        worst_v = std::max(worst_v, std::abs(meyer_auxiliary(a) + meyer_auxiliary(1.0 - a) - 1.0));
    }
    const bool ok = std::abs(lo_sum - std::sqrt(2.0)) < 1e-6 && std::abs(hi_sum) < 1e-6 && std::abs(norm - 1.0) < 1e-6 &&
                    worst_v < 1e-12;
    return {ok, "taps " + std::to_string(f.lowpass.size()) + ", sum(lo)-sqrt2 " + fmt("%.2g", lo_sum - std::sqrt(2.0)) +
                    ", sum(hi) " + fmt("%.2g", hi_sum) + ", |lo|-1 " + fmt("%.2g", norm - 1.0) + ", v identities " +
                    fmt("%.2g", worst_v)};
}

// ---- 4
double batch_loss(const BdLstmModel& m, const SequenceBatch& xs, const Eigen::MatrixXd& y, const Rng* rng) {
    Rng copy = rng ? *rng : Rng();
    return loss(forward_batch(m, xs, rng != nullptr, rng ? &copy : nullptr, nullptr), y, m);
}

Outcome gradient_check() {
    Rng meta(4);
    double worst = 0.0;
    std::size_t checked = 0;
    const Activation acts[] = {Activation::Tanh, Activation::Relu, Activation::Elu, Activation::Identity};
    for (int trial = 0; trial < 20; ++trial) {
        ModelSpec s;
        s.input_size = 1 + static_cast<Eigen::Index>(meta.below(4));
        const std::size_t layers = 1 + meta.below(2);
        for (std::size_t l = 0; l < layers; ++l) s.bdlstm_sizes.push_back(1 + static_cast<int>(meta.below(8)));
        s.dropout = {trial % 2 ? 0.25 : 0.0};
        if (meta.below(2)) s.fc_sizes = {1 + static_cast<int>(meta.below(6))};
        s.activation = acts[trial % 4];
        s.horizon = 1 + static_cast<Eigen::Index>(meta.below(3));
        s.l2 = meta.uniform(0.0, 0.01);
        const std::size_t T = 1 + meta.below(12), batch = 1 + meta.below(3);

        Rng rng(100 + trial);
        auto model = init_model(s, rng);
        for (auto& p : parameters(model))
            for (auto& v : p.values()) v = rng.uniform(-0.6, 0.6);
        SequenceBatch xs(T, Eigen::MatrixXd(s.input_size, static_cast<Eigen::Index>(batch)));
        for (auto& m : xs)
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
        Eigen::MatrixXd y(s.horizon, static_cast<Eigen::Index>(batch));
        for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = rng.uniform(-1.0, 1.0);

        const bool dropout = s.dropout[0] > 0.0;
        const Rng drop(900 + trial);
        Rng drop_copy = drop;
        auto lg = loss_and_gradients(model, xs, y, dropout ? &drop_copy : nullptr);
        auto refs = parameters(model);
        auto grads = parameters(lg.gradients);
        for (std::size_t p = 0; p < refs.size(); ++p) {
            for (std::size_t k = 0; k < refs[p].size(); ++k) {
                double& w = refs[p].data[k];
                const double orig = w, h = 1e-5;
                w = orig + h;
                const double up = batch_loss(model, xs, y, dropout ? &drop : nullptr);
                w = orig - h;
                const double down = batch_loss(model, xs, y, dropout ? &drop : nullptr);
                w = orig;
                const double numeric = (up - down) / (2.0 * h), analytic = grads[p].data[k];
                const double rel =
                    std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-6});
                worst = std::max(worst, rel);
                ++checked;
            }
        }
    }
    return {worst < 1e-4, std::to_string(checked) + " parameters, worst relative error " + fmt("%.3g", worst)};
}

// ---- 5
Outcome metric_oracles() {
    Rng rng(5);
    double worst = 0.0;
    bool ordered = true;
    auto rel = [&](double a, long double b) { worst = std::max(worst, testing::rel_err(a, static_cast<double>(b))); };
    for (int c = 0; c < 100; ++c) {
        const std::size_t n = 2 + rng.below(500);
        const double scale = std::pow(10.0, rng.uniform(-3.0, 4.0));
        const double offset = rng.uniform(-100.0, 100.0);
        std::vector<double> y(n), yh(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = offset + scale * testing::normal(rng);
            yh[i] = y[i] + scale * rng.uniform(-1.0, 1.0);
        }
        long double abs_sum = 0, sq_sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double e = static_cast<long double>(y[i]) - yh[i];
            abs_sum += std::fabs(e);
            sq_sum += e * e;
        }
        const double m = mae(y, yh), r = rmse(y, yh);
        rel(m, abs_sum / n);
        rel(r, std::sqrt(sq_sum / n));
        ordered = ordered && r >= m;

        const auto s = descriptive_stats(y);
        long double sum = 0;
        for (const double v : y) sum += v;
        const long double mean = sum / n;
        long double m2 = 0, m3 = 0, m4 = 0;
        for (const double v : y) {
            const long double d = v - mean;
            m2 += d * d;
            m3 += d * d * d;
            m4 += d * d * d * d;
        }
        m2 /= n;
        m3 /= n;
        m4 /= n;
        rel(s.mean, mean);
        rel(s.max, *std::max_element(y.begin(), y.end()));
        rel(s.min, *std::min_element(y.begin(), y.end()));
        rel(s.std_dev, std::sqrt(m2 * n / (n - 1)));
        rel(s.skewness, m3 / std::pow(m2, 1.5L));
        rel(s.kurtosis, m4 / (m2 * m2));
    }
    return {worst < 1e-10 && ordered,
            "worst relative error " + fmt("%.3g", worst) + (ordered ? ", RMSE >= MAE throughout" : ", RMSE < MAE seen")};
}

// ---- 6
// Dickey-Fuller t-ratio by the normal equations: dy_t = a [+ b t] + rho y_{t-1}.
double df_oracle(const std::vector<double>& y, bool trend) {
    const Eigen::Index T = static_cast<Eigen::Index>(y.size()) - 1, k = trend ? 3 : 2;
    Eigen::MatrixXd X(T, k);
    Eigen::VectorXd dy(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        dy(t) = y[t + 1] - y[t];
        X(t, 0) = y[t];
        X(t, 1) = 1.0;
        if (trend) X(t, 2) = static_cast<double>(t + 1);
    }
    const Eigen::MatrixXd XtX_inv = (X.transpose() * X).inverse();
    const Eigen::VectorXd beta = XtX_inv * X.transpose() * dy;
    const double s2 = (dy - X * beta).squaredNorm() / static_cast<double>(T - k);
    return beta(0) / std::sqrt(s2 * XtX_inv(0, 0));
}

Outcome unit_root_behaviour() {
    Rng rng(6);
    int walk_kept = 0, noise_rejected = 0;
    double worst_pp = 0.0;
    for (int sim = 0; sim < 100; ++sim) {
        const auto walk = testing::random_walk(rng, 1000);
        const auto noise = testing::normal_vector(rng, 1000);
        UnitRootSpec adf;
        if (!adf_test(walk, adf).reject_at[1]) ++walk_kept;
        if (adf_test(noise, adf).reject_at[1]) ++noise_rejected;
        for (const auto det : {Deterministic::Intercept, Deterministic::TrendAndIntercept}) {
            UnitRootSpec pp;
            pp.test = UnitRootTest::PhillipsPerron;
            pp.deterministic = det;
            pp.fixed_bandwidth = 0;
            for (const auto* series : {&walk, &noise}) {
                const double oracle = df_oracle(*series, det == Deterministic::TrendAndIntercept);
                worst_pp = std::max(worst_pp, std::abs(pp_test(*series, pp).statistic - oracle));
            }
        }
    }
    const auto ci = critical_values(Deterministic::Intercept);
    const auto ct = critical_values(Deterministic::TrendAndIntercept);
    const bool verbatim = ci == std::array<double, 3>{-3.431479, -2.861924, -2.567017} &&
                          ct == std::array<double, 3>{-3.959877, -3.410705, -3.127138};
    const bool ok = walk_kept >= 90 && noise_rejected >= 95 && worst_pp < 1e-10 && verbatim;
    return {ok, "walks kept " + std::to_string(walk_kept) + "/100, white noise rejected " +
                    std::to_string(noise_rejected) + "/100, |PP(0) - DF| " + fmt("%.2g", worst_pp) +
                    (verbatim ? ", critical values verbatim" : ", critical values differ")};
}

// ---- 7
Outcome overfit_sanity() {
    auto frame = testing::synthetic_market_frame(60, 7, 0.0);
    PipelineConfig cfg;
    cfg.lookback = 16;
    cfg.horizon = 1;
    cfg.batch_size = 4;
    cfg.epochs = 200;
    cfg.dropout = {0.2, 0.1};
    const auto scaler = fit_scaler(frame, frame.columns);
    auto data = build_dataset(apply_scaler(scaler, frame), cfg);
    data.num_samples = 20;
    data.inputs.resize(20 * cfg.lookback * data.num_features);
    data.targets.resize(20);
    const HyperParams best;  // 64-64, FC 12, tanh, Adam 0.001, decay 1e-6, L2 1e-4
    auto state = init_training(best, cfg, data.num_features, 7);
    train_epochs(state, data, cfg, cfg.epochs);
    const auto pred = predict(state.model, data);
    const Eigen::Map<const Eigen::MatrixXd> y(data.targets.data(), 1, 20);
    const double m = mse(pred, y);
    return {m < 1e-3, "training-window MSE " + fmt("%.3g", m) + " after 200 epochs (final epoch loss " +
                          fmt("%.3g", state.loss_trace.back()) + ")"};
}

// ---- 8
Outcome pipeline_ordering() {
    const auto frame = testing::synthetic_market_frame(2000, 8);
    PipelineConfig cfg;
    cfg.lookback = 32;
    cfg.horizon = 1;
    cfg.epochs = 30;
    cfg.batch_size = 32;
    cfg.seed = 8;
    // 2 x 2 x 2 = 8 combinations; each mode keeps its own best point.
    GridSpace space;
    space.bdlstm_sizes = {{8}, {16}};
    space.fc_sizes = {{}, {12}};
    space.activations = {Activation::Tanh};
    space.optimizers = {OptimizerKind::Adam};
    space.learning_rates = {0.01, 0.003};
    space.decays = {1e-6};
    space.l2s = {1e-4};
    const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double med[3] = {};
    std::string detail;
    const InputMode modes[] = {InputMode::Raw, InputMode::WtAd, InputMode::WtAda};
    for (int i = 0; i < 3; ++i) {
        auto c = cfg;
        c.mode = modes[i];
        const auto data = prepare_data(frame, c);
        const auto grid = grid_search(space, data, c, parse_grid_budget("full"), worker_threads());
        if (grid.ranking.empty()) return {false, std::string(to_string(modes[i])) + ": every grid trial failed"};
        const auto hp = grid.trials[grid.ranking.front()].hyperparams;
        const auto report = compare_configurations(frame, hp, seeds, c, {c.target}, {modes[i]}, worker_threads());
        med[i] = report.cells.at(0).median.rmse;
        detail += std::string(i ? ", " : "") + to_string(modes[i]) + " " + fmt("%.5f", med[i]) + " [" + hp.describe() + "]";
    }
    return {med[1] <= med[0] && med[2] <= med[0], "median test RMSE " + detail};
}

// ---- 9
int run_cli(const std::string& args, const fs::path& cwd) {
    const std::string cmd = "cd '" + cwd.string() + "' && '" WAVECAST_CLI "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct ScratchDir {
    fs::path path = fs::temp_directory_path() / ("wavecast_accept_" + std::to_string(::getpid()));
    ScratchDir() { fs::create_directories(path); }
    ~ScratchDir() { fs::remove_all(path); }
};

Outcome gridsearch_determinism() {
    ScratchDir dir;
    std::ofstream(dir.path / "frame.csv") << frame_to_csv(testing::synthetic_market_frame(400, 9));
    const std::string common =
        "frame = frame.csv\nlookback = 16\nhorizon = 2\nepochs = 3\nbatch_size = 16\nmode = WT_ADA\n"
        "grid.bdlstm = 4;6,4\ngrid.fc = none;3\ngrid.activation = tanh,relu\ngrid.optimizer = adam\n"
        "grid.learning_rate = 0.01\ngrid.decay = 1e-6\ngrid.l2 = 0.0001\nbudget = full\nthreads = 3\n";
    std::ofstream(dir.path / "a.manifest") << common << "out = a\n";
    std::ofstream(dir.path / "b.manifest") << common << "out = b\n";
    for (const char* m : {"a.manifest", "b.manifest"}) {
        if (const int rc = run_cli(std::string("gridsearch --quiet --seed 99 --manifest ") + m, dir.path); rc != 0) {
            return {false, std::string("gridsearch exited with ") + std::to_string(rc)};
        }
    }
    const auto ta = slurp(dir.path / "a/trials.json"), tb = slurp(dir.path / "b/trials.json");
    const auto ra = slurp(dir.path / "a/ranking.csv"), rb = slurp(dir.path / "b/ranking.csv");
    const auto trials = nlohmann::json::parse(ta).at("trials").size();
    const bool ok = !ta.empty() && ta == tb && !ra.empty() && ra == rb && trials == 8;
    return {ok, std::to_string(trials) + " trials; trials.json " + (ta == tb ? "identical" : "differs") +
                    ", ranking.csv " + (ra == rb ? "identical" : "differs")};
}

// ---- 10
Outcome feature_counts() {
    const auto frame = testing::synthetic_market_frame(300, 10);
    PipelineConfig cfg;
    cfg.lookback = 32;
    cfg.horizon = 2;
    std::size_t width[3] = {};
    const InputMode modes[] = {InputMode::Raw, InputMode::WtAd, InputMode::WtAda};
    for (int i = 0; i < 3; ++i) {
        cfg.mode = modes[i];
        const auto d = prepare_data(frame, cfg);
        if (d.train.num_features != d.test.num_features || d.feature_names.size() != d.train.num_features) {
            return {false, "train/test feature widths disagree"};
        }
        width[i] = d.train.num_features;
    }

    // The same contract through the command-line pipeline.
    ScratchDir dir;
    std::ofstream(dir.path / "frame.csv") << frame_to_csv(frame);
    std::size_t cli_width[2] = {};
    const char* names[] = {"WT_AD", "WT_ADA"};
    for (int i = 0; i < 2; ++i) {
        std::ofstream(dir.path / "m") << "frame = frame.csv\nout = out\nlookback = 32\nhorizon = 2\nepochs = 1\n"
                                         "bdlstm = 4\nfc = none\nseed = 1\nmode = "
                                      << names[i] << "\n";
        if (run_cli("train --quiet --manifest m", dir.path) != 0) return {false, "train failed"};
        cli_width[i] = nlohmann::json::parse(slurp(dir.path / "out/train.json")).at("features").get<std::size_t>();
    }
    const bool ok = frame.cols() == 5 && width[0] == 5 && width[1] == 30 && width[2] == 25 && cli_width[0] == 30 &&
                    cli_width[1] == 25;
    return {ok, "RAW " + std::to_string(width[0]) + ", WT_AD " + std::to_string(width[1]) + ", WT_ADA " +
                    std::to_string(width[2]) + "; via CLI " + std::to_string(cli_width[0]) + "/" +
                    std::to_string(cli_width[1])};
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;  // 0 means no runtime bound
        std::function<Outcome()> run;
    };
    const Criterion criteria[] = {
        {1, "SWT perfect reconstruction", 10.0, swt_reconstruction},
        {2, "SWT shift invariance", 0.0, swt_shift_invariance},
        {3, "Meyer filter invariants", 0.0, meyer_invariants},
        {4, "BPTT gradients vs central differences", 60.0, gradient_check},
        {5, "metric and statistic oracles", 0.0, metric_oracles},
        {6, "unit-root behaviour", 0.0, unit_root_behaviour},
        {7, "overfit sanity, best architecture", 300.0, overfit_sanity},
        {8, "pipeline ordering WT_AD/WT_ADA <= RAW", 1800.0, pipeline_ordering},
        {9, "gridsearch determinism", 0.0, gridsearch_determinism},
        {10, "feature-count contract", 0.0, feature_counts},
    };
    // Optional argument: a comma-separated list of criterion ids to run.
    std::vector<int> only;
    if (argc > 1) {
        std::stringstream ss(argv[1]);
        for (std::string tok; std::getline(ss, tok, ',');) only.push_back(std::stoi(tok));
    }
    set_verbosity(0);
    int failures = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0.0 && secs >= c.limit_seconds) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.limit_seconds) + " s budget";
        }
        std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
