#pragma once

// Raw data ingestion: Yahoo-format OHLCV files, JHU CSSE case counts, the
// date-aligned multivariate frame built from them, plus the scaling, splitting
// and windowing that turn a frame into supervised samples.

#include "wavecast/csv.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wavecast {

struct RawOhlcvRecord {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double adj_close = 0.0;
    double volume = 0.0;
};

struct OhlcvParseResult {
    std::vector<RawOhlcvRecord> records;  // sorted by date
    std::size_t dropped_rows = 0;         // rows carrying a literal `null`
};

/// Parses a Yahoo finance daily history export with header
/// `Date,Open,High,Low,Close,Adj Close,Volume`.
OhlcvParseResult parse_ohlcv(std::string_view csv_text);

struct CaseSeries {
    std::vector<Date> dates;               // contiguous daily
    std::vector<std::int64_t> confirmed;   // cumulative, non-decreasing
};

/// Parses the JHU CSSE wide global time-series file and sums every region row
/// into a single global cumulative series.
CaseSeries parse_jhu_cases(std::string_view csv_text);

struct PriceSeries {
    std::string name;
    std::vector<Date> dates;
    std::vector<double> close;
};

PriceSeries close_prices(std::string name, const std::vector<RawOhlcvRecord>& records);

inline constexpr std::string_view kCasesColumn = "covid_cases";

struct TimeSeriesFrame {
    std::vector<Date> dates;
    std::vector<std::string> columns;
    Eigen::MatrixXd values;  // rows = dates, cols = columns

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return columns.size(); }
    std::size_t column_index(std::string_view name) const;
    std::vector<double> column(std::string_view name) const;
    TimeSeriesFrame slice_rows(std::size_t first, std::size_t count) const;
};

/// Inner-joins the price series on date and appends the case column
/// (zero before the case series starts, forward-filled across gaps).
TimeSeriesFrame align(const std::vector<PriceSeries>& prices, const CaseSeries& cases);

/// CSV with header `date,<column>...`; values use shortest round-trip formatting.
std::string frame_to_csv(const TimeSeriesFrame& frame);
TimeSeriesFrame frame_from_csv(std::string_view csv_text);

struct DescriptiveStats {
    double mean = 0.0;
    double max = 0.0;
    double min = 0.0;
    double std_dev = 0.0;   // n - 1 divisor
    double kurtosis = 0.0;  // Pearson m4 / m2^2 (not excess)
    double skewness = 0.0;  // m3 / m2^1.5
    std::size_t n = 0;
};

DescriptiveStats descriptive_stats(std::span<const double> column);

struct ScalerParams {
    std::vector<std::string> columns;
    std::vector<double> min;
    std::vector<double> max;

    bool fitted() const { return !columns.empty(); }
    std::size_t index_of(std::string_view column) const;
};

/// Min-max scaler fitted on the given columns of `frame`.
ScalerParams fit_scaler(const TimeSeriesFrame& frame, const std::vector<std::string>& columns);
TimeSeriesFrame apply_scaler(const ScalerParams& params, const TimeSeriesFrame& frame);
TimeSeriesFrame invert_scaler(const ScalerParams& params, const TimeSeriesFrame& frame);
double scale_value(const ScalerParams& params, std::string_view column, double x);
double invert_value(const ScalerParams& params, std::string_view column, double scaled);

/// Train rows = floor(n * train_fraction). Each partition must hold at least
/// `min_partition_rows` rows.
std::pair<TimeSeriesFrame, TimeSeriesFrame> chronological_split(const TimeSeriesFrame& frame, double train_fraction,
                                                                std::size_t min_partition_rows = 1);

TimeSeriesFrame concat_rows(const TimeSeriesFrame& head, const TimeSeriesFrame& tail);

struct WindowedDataset {
    std::size_t num_samples = 0;
    std::size_t lookback = 0;
    std::size_t num_features = 0;
    std::size_t horizon = 0;
    std::string target_column;
    std::vector<double> inputs;   // [sample][step][feature]
    std::vector<double> targets;  // [sample][step]

    double input(std::size_t sample, std::size_t step, std::size_t feature) const {
        return inputs[(sample * lookback + step) * num_features + feature];
    }
    double target(std::size_t sample, std::size_t step) const { return targets[sample * horizon + step]; }
};

/// Sample i takes feature rows [i, i + lookback) and target rows
/// [i + lookback, i + lookback + horizon).
WindowedDataset make_windows(const Eigen::MatrixXd& features, std::span<const double> target, std::size_t lookback,
                             std::size_t horizon, std::string target_column = {});

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t lookback, std::size_t horizon,
                             const std::string& target_column);

}  // namespace wavecast
