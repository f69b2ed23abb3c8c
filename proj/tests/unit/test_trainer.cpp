#include "helpers.hpp"

#include "wavecast/checkpoint.hpp"
#include "wavecast/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace wavecast;

namespace {

HyperParams small_hp() {
    HyperParams hp;
    hp.bdlstm_sizes = {6};
    hp.fc_sizes = {4};
    hp.learning_rate = 0.01;
    hp.decay = 0.0;
    hp.l2 = 1e-4;
    return hp;
}

PipelineConfig small_config(InputMode mode = InputMode::Raw) {
    PipelineConfig c;
    c.mode = mode;
    c.lookback = 16;
    c.horizon = 2;
    c.epochs = 2;
    c.batch_size = 16;
    c.seed = 11;
    return c;
}

std::vector<double> flat_params(BdLstmModel m) {
    std::vector<double> out;
    for (const auto& p : parameters(m)) out.insert(out.end(), p.values().begin(), p.values().end());
    return out;
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("metric examples") {
    const std::vector<double> y{1.0, 2.0};
    CHECK(mae(y, y) == 0.0);
    CHECK(rmse(y, y) == 0.0);
    CHECK(mae(y, std::vector<double>{0.0, 3.0}) == 1.0);
    CHECK(rmse(y, std::vector<double>{0.0, 3.0}) == 1.0);
    CHECK(mae(y, std::vector<double>{1.0, 0.0}) == 1.0);
    CHECK(rmse(y, std::vector<double>{1.0, 0.0}) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_ERROR_KIND(mae(y, std::vector<double>{1.0}), ErrorKind::Usage);
    CHECK_ERROR_KIND(rmse(std::vector<double>{}, std::vector<double>{}), ErrorKind::Usage);
}

TEST_CASE("metrics ignore pair order and respect the power-mean bound") {
    Rng rng(12);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = testing::uniform_vector(rng, 40);
        auto b = testing::uniform_vector(rng, 40);
        const double r = rmse(a, b), m = mae(a, b);
        CHECK(r >= m);
        std::vector<std::size_t> perm(40);
        for (std::size_t i = 0; i < 40; ++i) perm[i] = i;
        for (std::size_t i = 39; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        std::vector<double> pa(40), pb(40);
        for (std::size_t i = 0; i < 40; ++i) {
            pa[i] = a[perm[i]];
            pb[i] = b[perm[i]];
        }
        CHECK(rmse(pa, pb) == doctest::Approx(r).epsilon(1e-14));
        CHECK(mae(pa, pb) == doctest::Approx(m).epsilon(1e-14));
    }
}

TEST_CASE("feature shapes per mode") {
    const auto frame = testing::synthetic_market_frame(300, 1);
    const auto scaler = fit_scaler(frame, frame.columns);
    const auto scaled = apply_scaler(scaler, frame);
    PipelineConfig c;
    c.lookback = 128;
    c.horizon = 5;
    for (const auto& [mode, width] : {std::pair{InputMode::Raw, 5}, {InputMode::WtAd, 30}, {InputMode::WtAda, 25}}) {
        c.mode = mode;
        const auto d = build_dataset(scaled, c);
        CHECK(d.lookback == 128);
        CHECK(d.num_features == static_cast<std::size_t>(width));
        CHECK(d.num_samples == 300 - 128 - 5 + 1);
        // Targets come from the scaled target column, never the coefficients.
        const auto target = scaled.column("crude_oil");
        for (const std::size_t i : {std::size_t{0}, std::size_t{17}, d.num_samples - 1}) {
            for (std::size_t h = 0; h < 5; ++h) CHECK(d.target(i, h) == target[i + 128 + h]);
        }
    }
}

TEST_CASE("input mode names") {
    CHECK(parse_input_mode("RAW") == InputMode::Raw);
    CHECK(parse_input_mode("WT_AD") == InputMode::WtAd);
    CHECK(parse_input_mode("wt-ada") == InputMode::WtAda);
    CHECK(std::string(to_string(InputMode::WtAda)) == "WT_ADA");
    CHECK_ERROR_KIND(parse_input_mode("WT"), ErrorKind::Usage);
}

TEST_CASE("prepared data keeps partitions apart") {
    const auto frame = testing::synthetic_market_frame(400, 2);
    for (const auto mode : {InputMode::Raw, InputMode::WtAda}) {
        const auto cfg = small_config(mode);
        const auto d = prepare_data(frame, cfg);
        CHECK(d.train.num_samples == 320 - 16 - 2 + 1);
        CHECK(d.test.num_samples == 80 - 16 - 2 + 1);
        CHECK(d.feature_names.size() == d.train.num_features);
        CHECK(d.range_fallback.empty());
        // Scaler min/max come from training rows only.
        const auto train_rows = frame.slice_rows(0, 320).column("crude_oil");
        CHECK(d.scaler.min[0] == *std::min_element(train_rows.begin(), train_rows.end()));
        CHECK(d.scaler.max[0] == *std::max_element(train_rows.begin(), train_rows.end()));
    }
}

TEST_CASE("constant training column falls back to its full range") {
    auto frame = testing::synthetic_market_frame(200, 3);
    std::vector<std::string> fallback;
    // covid_cases is zero for the first half of the synthetic frame.
    const auto s = fit_training_scaler(frame, 80, "crude_oil", &fallback);
    CHECK(fallback == std::vector<std::string>{"covid_cases"});
    const auto cases = frame.column("covid_cases");
    CHECK(s.max[4] == *std::max_element(cases.begin(), cases.end()));

    for (Eigen::Index r = 0; r < 80; ++r) frame.values(r, 0) = 50.0;
    CHECK_ERROR_KIND(fit_training_scaler(frame, 80, "crude_oil"), ErrorKind::Data);
}

TEST_CASE("default grid space") {
    const auto space = default_grid_space();
    CHECK(space.size() == 17496);
    CHECK(space.size() == 9u * 9u * 4u * 2u * 3u * 3u * 3u);
    HyperParams best;  // defaults are the reported best point
    std::size_t hits = 0;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto hp = space.at(i);
        if (hp == best) ++hits;
        seen.insert(hp.describe());
    }
    CHECK(hits == 1);
    CHECK(seen.size() == 17496);
    CHECK(space.at(1).l2 != space.at(0).l2);
    CHECK(space.at(0).bdlstm_sizes == space.at(17496 / 9 - 1).bdlstm_sizes);
    CHECK(space.at(0).bdlstm_sizes != space.at(17496 / 9).bdlstm_sizes);
    CHECK_ERROR_KIND(space.at(17496), ErrorKind::Usage);
    CHECK(point_space(best).size() == 1);
}

TEST_CASE("grid budgets") {
    const auto space = default_grid_space();
    CHECK(select_trials(point_space(HyperParams{}), parse_grid_budget("full"), 1) == std::vector<std::size_t>{0});

    const auto r = select_trials(space, parse_grid_budget("random_10"), 42);
    CHECK(r.size() == 10);
    CHECK(std::is_sorted(r.begin(), r.end()));
    CHECK(std::set<std::size_t>(r.begin(), r.end()).size() == 10);
    CHECK(select_trials(space, parse_grid_budget("random_10"), 42) == r);
    CHECK(select_trials(space, parse_grid_budget("random_10"), 43) != r);

    const auto f = parse_grid_budget("fixed:5,2,9");
    CHECK(select_trials(space, f, 0) == std::vector<std::size_t>{5, 2, 9});
    CHECK(to_string(f) == "fixed:5,2,9");
    CHECK(to_string(parse_grid_budget("random_7")) == "random_7");

    GridSpace small;
    small.bdlstm_sizes = {{2}, {3}};
    small.fc_sizes = {{}};
    small.activations = {Activation::Tanh};
    small.optimizers = {OptimizerKind::Adam};
    small.learning_rates = {0.01, 0.1};
    small.decays = {0.0};
    small.l2s = {0.0};
    CHECK(select_trials(small, parse_grid_budget("full"), 0) == std::vector<std::size_t>{0, 1, 2, 3});
    CHECK_ERROR_KIND(select_trials(small, parse_grid_budget("random_9"), 0), ErrorKind::Usage);

    CHECK_ERROR_KIND(parse_grid_budget("random_0"), ErrorKind::Usage);
    CHECK_ERROR_KIND(parse_grid_budget("some"), ErrorKind::Usage);
    CHECK_ERROR_KIND(select_trials(small, parse_grid_budget("fixed:4"), 0), ErrorKind::Usage);
    CHECK_ERROR_KIND(select_trials(small, parse_grid_budget("fixed:1,1"), 0), ErrorKind::Usage);
    GridSpace empty = small;
    empty.l2s.clear();
    CHECK_ERROR_KIND(select_trials(empty, parse_grid_budget("full"), 0), ErrorKind::Usage);
}

TEST_CASE("ranking order") {
    std::vector<TrialResult> t(5);
    const double rm[5] = {0.3, 0.1, 0.1, 0.2, 0.05};
    const double ma[5] = {0.2, 0.08, 0.05, 0.1, 0.01};
    const std::size_t idx[5] = {10, 4, 7, 2, 1};
    for (std::size_t i = 0; i < 5; ++i) {
        t[i].rmse = rm[i];
        t[i].mae = ma[i];
        t[i].index = idx[i];
    }
    t[4].failed = true;
    CHECK(rank_trials(t) == std::vector<std::size_t>{2, 1, 3, 0});
    t[2].mae = 0.08;
    CHECK(rank_trials(t) == std::vector<std::size_t>{1, 2, 3, 0});
}

TEST_CASE("zero epochs evaluates the initial model") {
    const auto frame = testing::synthetic_market_frame(300, 4);
    auto cfg = small_config();
    cfg.epochs = 0;
    const auto data = prepare_data(frame, cfg);
    const auto trial = train_and_evaluate(small_hp(), data, cfg, 99);
    REQUIRE_FALSE(trial.result.failed);
    CHECK(trial.result.loss_trace.empty());
    const auto init = init_training(small_hp(), cfg, data.train.num_features, 99);
    const auto m = evaluate(init.model, data.test, data.scaler, MetricUnits::Scaled);
    CHECK(trial.result.rmse == m.rmse);
    CHECK(trial.result.mae == m.mae);
}

TEST_CASE("memorization on a tiny training set") {
    const auto frame = testing::synthetic_market_frame(60, 5);
    auto cfg = small_config();
    cfg.lookback = 8;
    cfg.horizon = 1;
    cfg.dropout = {0.0};
    cfg.batch_size = 4;
    cfg.epochs = 200;
    const auto scaler = fit_scaler(frame, frame.columns);
    const auto all = build_dataset(apply_scaler(scaler, frame), cfg);
    PreparedData d;
    d.scaler = scaler;
    d.train = all;
    d.train.num_samples = 20;
    d.train.inputs.resize(20 * 8 * 5);
    d.train.targets.resize(20);
    d.test = d.train;
    auto hp = small_hp();
    hp.bdlstm_sizes = {8};
    hp.fc_sizes = {};
    hp.l2 = 0.0;
    const auto trial = train_and_evaluate(hp, d, cfg, 3);
    REQUIRE_FALSE(trial.result.failed);
    CHECK(trial.result.loss_trace.size() == 200);
    CHECK(trial.result.rmse < 0.03);
}

TEST_CASE("same seed, same trial") {
    const auto frame = testing::synthetic_market_frame(300, 6);
    const auto cfg = small_config(InputMode::WtAd);
    const auto data = prepare_data(frame, cfg);
    const auto a = train_and_evaluate(small_hp(), data, cfg, 5);
    const auto b = train_and_evaluate(small_hp(), data, cfg, 5);
    CHECK(a.result.rmse == b.result.rmse);
    CHECK(a.result.mae == b.result.mae);
    CHECK(a.result.loss_trace == b.result.loss_trace);
    CHECK(flat_params(a.state->model) == flat_params(b.state->model));
    const auto c = train_and_evaluate(small_hp(), data, cfg, 6);
    CHECK(c.result.loss_trace != a.result.loss_trace);
}

TEST_CASE("test targets never reach training") {
    const auto frame = testing::synthetic_market_frame(300, 7);
    for (const auto mode : {InputMode::Raw, InputMode::WtAd}) {
        CAPTURE(to_string(mode));
        const auto cfg = small_config(mode);
        const auto data = prepare_data(frame, cfg);

        // Replace every test-partition target value in the raw frame with a sentinel.
        auto poisoned = frame;
        const auto train_rows = static_cast<Eigen::Index>(std::floor(300 * cfg.train_fraction));
        for (Eigen::Index r = train_rows; r < 300; ++r) poisoned.values(r, 0) = 1e6;
        const auto pdata = prepare_data(poisoned, cfg);
        CHECK(pdata.train.inputs == data.train.inputs);
        CHECK(pdata.train.targets == data.train.targets);

        const auto a = train_and_evaluate(small_hp(), data, cfg, 8);
        const auto b = train_and_evaluate(small_hp(), pdata, cfg, 8);
        Checkpoint ca{a.state->model, a.state->optimizer, 8, a.state->rng.state(), nullptr};
        Checkpoint cb{b.state->model, b.state->optimizer, 8, b.state->rng.state(), nullptr};
        CHECK(checkpoint_to_string(ca) == checkpoint_to_string(cb));
        CHECK(a.result.rmse != b.result.rmse);
    }
}

TEST_CASE("grid search visits each point once and ranks deterministically") {
    const auto frame = testing::synthetic_market_frame(240, 8);
    auto cfg = small_config();
    cfg.epochs = 1;
    const auto data = prepare_data(frame, cfg);
    GridSpace space;
    space.bdlstm_sizes = {{3}, {4}};
    space.fc_sizes = {{}, {2}};
    space.activations = {Activation::Tanh};
    space.optimizers = {OptimizerKind::Adam, OptimizerKind::RmsProp};
    space.learning_rates = {0.01};
    space.decays = {0.0};
    space.l2s = {0.0};
    std::size_t calls = 0;
    const auto serial = grid_search(space, data, cfg, parse_grid_budget("full"), 1, [&](const TrialResult&) { ++calls; });
    CHECK(calls == 8);
    REQUIRE(serial.trials.size() == 8);
    std::set<std::size_t> indices;
    for (const auto& t : serial.trials) {
        indices.insert(t.index);
        CHECK(t.seed == derive_seed(cfg.seed, t.index));
        CHECK(t.rmse >= t.mae);
    }
    CHECK(indices.size() == 8);
    CHECK(serial.ranking == rank_trials(serial.trials));

    const auto parallel = grid_search(space, data, cfg, parse_grid_budget("full"), 3);
    CHECK(parallel.ranking == serial.ranking);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(parallel.trials[i].index == serial.trials[i].index);
        CHECK(parallel.trials[i].rmse == serial.trials[i].rmse);
        CHECK(parallel.trials[i].loss_trace == serial.trials[i].loss_trace);
    }

    const auto single = grid_search(point_space(small_hp()), data, cfg, parse_grid_budget("full"));
    CHECK(single.trials.size() == 1);
    CHECK(single.ranking == std::vector<std::size_t>{0});
}

TEST_CASE("diverging trial is recorded as failed") {
    const auto frame = testing::synthetic_market_frame(240, 9);
    auto cfg = small_config();
    cfg.epochs = 3;
    const auto data = prepare_data(frame, cfg);
    auto hp = small_hp();
    hp.learning_rate = 1e300;
    hp.optimizer = OptimizerKind::RmsProp;
    hp.activation = Activation::Identity;
    const auto t = train_and_evaluate(hp, data, cfg, 1);
    CHECK(t.result.failed);
    CHECK_FALSE(t.state.has_value());
    CHECK(std::isnan(t.result.rmse));
    CHECK(rank_trials({t.result}).empty());
}

TEST_CASE("business days") {
    using namespace std::chrono;
    const sys_days fri = year{2020} / April / 3;
    const auto d = next_business_days(fri, 5);
    REQUIRE(d.size() == 5);
    CHECK(d[0] == sys_days{year{2020} / April / 6});
    CHECK(d[4] == sys_days{year{2020} / April / 10});
    CHECK(next_business_days(sys_days{year{2020} / April / 7}, 1)[0] == sys_days{year{2020} / April / 8});
}

TEST_CASE("forecast maps predictions back to prices") {
    auto frame = testing::synthetic_market_frame(200, 10);
    PipelineConfig cfg;
    cfg.lookback = 128;
    cfg.horizon = 5;
    ScalerParams scaler = fit_scaler(frame, frame.columns);
    scaler.min[0] = 17.45;
    scaler.max[0] = 145.18;
    const auto half = forecast_with([](const Eigen::MatrixXd&) { return Eigen::VectorXd::Constant(5, 0.5); }, frame,
                                    scaler, cfg);
    REQUIRE(half.price.size() == 5);
    for (const double p : half.price) CHECK(p == doctest::Approx(81.315).epsilon(1e-12));
    CHECK(half.dates.front() > frame.dates.back());

    // A predictor copying the last scaled close repeats it.
    const auto copy = forecast_with(
        [](const Eigen::MatrixXd& w) {
            CHECK(w.rows() == 128);
            CHECK(w.cols() == 5);
            return Eigen::VectorXd::Constant(5, w(w.rows() - 1, 0));
        },
        frame, scaler, cfg);
    const double last_scaled = scale_value(scaler, "crude_oil", frame.values(199, 0));
    for (std::size_t h = 0; h < 5; ++h) {
        CHECK(copy.scaled[h] == last_scaled);
        CHECK(copy.price[h] == doctest::Approx(frame.values(199, 0)).epsilon(1e-12));
    }

    CHECK_ERROR_KIND(forecast_with([](const Eigen::MatrixXd&) { return Eigen::VectorXd::Zero(5); }, frame.slice_rows(0, 100),
                                   scaler, cfg),
                     ErrorKind::Data);
}

TEST_CASE("forecast with a trained model") {
    const auto frame = testing::synthetic_market_frame(300, 12);
    auto cfg = small_config();
    cfg.horizon = 5;
    const auto data = prepare_data(frame, cfg);
    const auto trial = train_and_evaluate(small_hp(), data, cfg, 3);
    const auto r = forecast(trial.state->model, frame, data.scaler, cfg);
    CHECK(r.price.size() == 5);
    CHECK(r.dates.size() == 5);
    for (std::size_t h = 0; h < 5; ++h) CHECK(r.price[h] == doctest::Approx(invert_value(data.scaler, "crude_oil", r.scaled[h])));
}

TEST_CASE("comparison report") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK_ERROR_KIND(median({}), ErrorKind::Usage);

    const auto frame = testing::synthetic_market_frame(240, 13);
    auto cfg = small_config();
    cfg.epochs = 1;
    cfg.horizon = 1;
    const auto one = compare_configurations(frame, small_hp(), {4}, cfg, {"crude_oil"}, {InputMode::Raw});
    REQUIRE(one.cells.size() == 1);
    const auto& cell = one.cells[0];
    CHECK(cell.rmse.size() == 1);
    CHECK(cell.median.rmse == cell.rmse[0]);
    CHECK(cell.min.rmse == cell.rmse[0]);
    CHECK(cell.max.mae == cell.mae[0]);
    auto c2 = cfg;
    c2.seed = 4;
    const auto direct = train_and_evaluate(small_hp(), prepare_data(frame, c2), c2, 4);
    CHECK(direct.result.rmse == cell.rmse[0]);

    const auto grid = compare_configurations(frame, small_hp(), {1, 2}, cfg, {"crude_oil", "dji"},
                                             {InputMode::Raw, InputMode::WtAd, InputMode::WtAda}, 2);
    REQUIRE(grid.cells.size() == 6);
    CHECK(grid.cells[0].target == "crude_oil");
    CHECK(grid.cells[2].mode == InputMode::WtAda);
    CHECK(grid.cells[3].target == "dji");
    for (const auto& c : grid.cells) {
        CHECK(c.median.rmse >= c.min.rmse);
        CHECK(c.median.rmse <= c.max.rmse);
    }
    const auto serial = compare_configurations(frame, small_hp(), {1, 2}, cfg, {"crude_oil", "dji"},
                                               {InputMode::Raw, InputMode::WtAd, InputMode::WtAda}, 1);
    for (std::size_t i = 0; i < 6; ++i) CHECK(serial.cells[i].rmse == grid.cells[i].rmse);
}

TEST_CASE("pipeline config validation") {
    PipelineConfig c;
    c.lookback = 0;
    CHECK_ERROR_KIND(c.validate(), ErrorKind::Usage);
    c = PipelineConfig{};
    c.train_fraction = 1.0;
    CHECK_ERROR_KIND(c.validate(), ErrorKind::Usage);
    c = PipelineConfig{};
    c.batch_size = 0;
    CHECK_ERROR_KIND(c.validate(), ErrorKind::Usage);
}

}  // TEST_SUITE
