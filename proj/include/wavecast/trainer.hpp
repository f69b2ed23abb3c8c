#pragma once

// Training pipeline: feature configurations (RAW, WT-AD, WT-ADA), model
// training and evaluation, grid search over hyperparameters, forecasting and
// multi-seed configuration comparison.

#include "wavecast/ingest.hpp"
#include "wavecast/network.hpp"
#include "wavecast/swt.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

enum class InputMode { Raw, WtAd, WtAda };
InputMode parse_input_mode(std::string_view name);
const char* to_string(InputMode mode);

/// Where the wavelet decomposition runs: on each partition separately, or on
/// the full scaled frame before splitting (leaks boundary information).
enum class SwtScope { Partition, Full };
SwtScope parse_swt_scope(std::string_view name);
const char* to_string(SwtScope scope);

enum class MetricUnits { Scaled, Price };
MetricUnits parse_metric_units(std::string_view name);
const char* to_string(MetricUnits units);

struct HyperParams {
    std::vector<int> bdlstm_sizes{64, 64};
    std::vector<int> fc_sizes{12};
    Activation activation = Activation::Tanh;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double learning_rate = 0.001;
    double decay = 1e-6;
    double l2 = 1e-4;

    std::string describe() const;
    bool operator==(const HyperParams&) const = default;
};

struct PipelineConfig {
    InputMode mode = InputMode::Raw;
    std::size_t lookback = 128;
    std::size_t horizon = 5;
    std::string target = "crude_oil";
    double train_fraction = 0.8;
    int epochs = 100;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    std::vector<double> dropout{0.2, 0.1};
    int swt_levels = 5;
    SwtScope scope = SwtScope::Partition;
    MetricUnits units = MetricUnits::Scaled;
    bool shuffle = true;

    void validate() const;
};

/// Mean absolute error and root mean square error over paired values.
double mae(std::span<const double> y, std::span<const double> y_hat);
double rmse(std::span<const double> y, std::span<const double> y_hat);

/// Feature columns for one scaled frame: the frame itself in RAW mode, the
/// wavelet expansion otherwise.
FeatureMatrix build_features(const TimeSeriesFrame& scaled, const PipelineConfig& config);

/// build_features + windowing; targets always come from the scaled target column.
WindowedDataset build_dataset(const TimeSeriesFrame& scaled, const PipelineConfig& config);

struct PreparedData {
    ScalerParams scaler;                      // fitted on the training rows
    std::vector<std::string> range_fallback;  // constant on training rows; full-frame range used
    std::vector<std::string> feature_names;
    WindowedDataset train;
    WindowedDataset test;
};

/// Scale (training rows only), split chronologically and window both partitions.
PreparedData prepare_data(const TimeSeriesFrame& frame, const PipelineConfig& config);

/// Scaler fitted on the first `train_rows` rows. The target column must vary
/// there; other constant columns fall back to their full-frame range.
ScalerParams fit_training_scaler(const TimeSeriesFrame& frame, std::size_t train_rows, const std::string& target,
                                 std::vector<std::string>* fallback = nullptr);

ModelSpec model_spec(const HyperParams& hp, const PipelineConfig& config, std::size_t num_features);

/// Gathers the given samples into a sequence batch and a (horizon x batch) target matrix.
SequenceBatch gather_inputs(const WindowedDataset& data, std::span<const std::size_t> samples);
Eigen::MatrixXd gather_targets(const WindowedDataset& data, std::span<const std::size_t> samples);

struct TrainingState {
    BdLstmModel model;
    OptimizerState optimizer;
    Rng rng;
    std::vector<double> loss_trace;  // mean training loss per epoch
};

TrainingState init_training(const HyperParams& hp, const PipelineConfig& config, std::size_t num_features,
                            std::uint64_t seed);

/// Runs `epochs` passes of mini-batch training. Throws a numeric error on divergence.
void train_epochs(TrainingState& state, const WindowedDataset& train, const PipelineConfig& config, int epochs);

/// Inference-mode predictions, (horizon x samples).
Eigen::MatrixXd predict(const BdLstmModel& model, const WindowedDataset& data);

struct Metrics {
    double rmse = 0.0;
    double mae = 0.0;
};

/// Metrics over every (sample, step) pair, optionally in price units.
Metrics evaluate(const BdLstmModel& model, const WindowedDataset& data, const ScalerParams& scaler,
                 MetricUnits units);

struct TrialResult {
    std::size_t index = 0;  // enumeration index in the grid
    HyperParams hyperparams;
    std::uint64_t seed = 0;
    std::vector<double> loss_trace;
    double rmse = 0.0;
    double mae = 0.0;
    double wall_time = 0.0;  // seconds
    bool failed = false;
    std::string failure;
};

struct TrainedTrial {
    TrialResult result;
    std::optional<TrainingState> state;  // empty when the trial failed
};

TrainedTrial train_and_evaluate(const HyperParams& hp, const PreparedData& data, const PipelineConfig& config,
                                std::uint64_t seed);

struct GridSpace {
    std::vector<std::vector<int>> bdlstm_sizes;
    std::vector<std::vector<int>> fc_sizes;
    std::vector<Activation> activations;
    std::vector<OptimizerKind> optimizers;
    std::vector<double> learning_rates;
    std::vector<double> decays;
    std::vector<double> l2s;

    std::size_t size() const;
    /// Mixed-radix decoding; the BDLSTM axis varies slowest, L2 fastest.
    HyperParams at(std::size_t index) const;
};

/// The searched hyperparameter space (17,496 points).
GridSpace default_grid_space();

/// Single-point space.
GridSpace point_space(const HyperParams& hp);

struct GridBudget {
    enum class Kind { Full, Random, Fixed } kind = Kind::Full;
    std::size_t count = 0;             // Random
    std::vector<std::size_t> indices;  // Fixed
};

/// `full`, `random_<k>` or `fixed:<i>,<j>,...`
GridBudget parse_grid_budget(std::string_view text);
std::string to_string(const GridBudget& budget);

/// Enumeration indices visited under `budget`, ascending for full and random.
std::vector<std::size_t> select_trials(const GridSpace& space, const GridBudget& budget, std::uint64_t run_seed);

struct GridResult {
    std::vector<TrialResult> trials;   // selection order
    std::vector<std::size_t> ranking;  // positions into `trials`, best first; failed trials excluded
};

using TrialCallback = std::function<void(const TrialResult&)>;

/// Trial i is trained with seed derive_seed(config.seed, enumeration index).
GridResult grid_search(const GridSpace& space, const PreparedData& data, const PipelineConfig& config,
                       const GridBudget& budget, unsigned threads = 1, const TrialCallback& on_trial = {});

/// Ranks by rmse, then mae, then enumeration index.
std::vector<std::size_t> rank_trials(const std::vector<TrialResult>& trials);

struct ForecastReport {
    std::vector<Date> dates;
    std::vector<double> scaled;
    std::vector<double> price;
};

/// Weekdays following `last`.
std::vector<Date> next_business_days(Date last, std::size_t count);

using Predictor = std::function<Eigen::VectorXd(const Eigen::MatrixXd& window)>;

/// Feeds the last `lookback` feature rows of `frame` to `predict_fn` and maps
/// the output back to price units.
ForecastReport forecast_with(const Predictor& predict_fn, const TimeSeriesFrame& frame, const ScalerParams& scaler,
                             const PipelineConfig& config);

ForecastReport forecast(const BdLstmModel& model, const TimeSeriesFrame& frame, const ScalerParams& scaler,
                        const PipelineConfig& config);

struct ComparisonCell {
    std::string target;
    InputMode mode = InputMode::Raw;
    std::vector<std::uint64_t> seeds;
    std::vector<double> rmse;  // per seed; NaN for failed runs
    std::vector<double> mae;
    std::size_t failures = 0;
    Metrics median;
    Metrics min;
    Metrics max;
};

struct ComparisonReport {
    std::vector<ComparisonCell> cells;  // target-major, mode-minor
};

double median(std::vector<double> values);

/// Every (target, mode) pair trained once per seed with the same hyperparameters.
ComparisonReport compare_configurations(const TimeSeriesFrame& frame, const HyperParams& hp,
                                        const std::vector<std::uint64_t>& seeds, const PipelineConfig& base,
                                        const std::vector<std::string>& targets,
                                        const std::vector<InputMode>& modes, unsigned threads = 1);

}  // namespace wavecast
