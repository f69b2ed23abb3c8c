#include "wavecast/ingest.hpp"

#include "wavecast/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

namespace wavecast {

namespace {

std::string line_prefix(std::size_t line_number) { return "line " + std::to_string(line_number) + ": "; }

std::size_t find_header_column(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) {
            return i;
        }
    }
    fail(ErrorKind::Format, "header is missing column '" + std::string(name) + "'");
}

std::vector<std::string_view> non_blank_lines(std::string_view text, std::vector<std::size_t>& line_numbers) {
    std::vector<std::string_view> out;
    const auto lines = split_lines(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!trim(lines[i]).empty()) {
            out.push_back(lines[i]);
            line_numbers.push_back(i + 1);
        }
    }
    return out;
}

}  // namespace

OhlcvParseResult parse_ohlcv(std::string_view csv_text) {
    std::vector<std::size_t> line_numbers;
    const auto lines = non_blank_lines(csv_text, line_numbers);
    if (lines.empty()) {
        fail(ErrorKind::Format, "missing header row");
    }

    const auto header = split_csv_line(lines.front());
    static constexpr std::array<std::string_view, 7> kNames = {"Date",  "Open",      "High",  "Low",
                                                               "Close", "Adj Close", "Volume"};
    std::array<std::size_t, 7> idx{};
    for (std::size_t k = 0; k < kNames.size(); ++k) {
        idx[k] = find_header_column(header, kNames[k]);
    }

    OhlcvParseResult result;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::size_t ln = line_numbers[r];
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() < header.size()) {
            fail(ErrorKind::Format, line_prefix(ln) + "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        const auto date = parse_iso_date(fields[idx[0]]);
        if (!date) {
            fail(ErrorKind::Format, line_prefix(ln) + "invalid date '" + fields[idx[0]] + "'");
        }

        bool has_null = false;
        std::array<double, 6> v{};
        for (std::size_t k = 1; k < kNames.size(); ++k) {
            const auto field = trim(fields[idx[k]]);
            if (field == "null") {
                has_null = true;
                continue;
            }
            const auto parsed = parse_double(field);
            if (!parsed || !std::isfinite(*parsed)) {
                fail(ErrorKind::Format, line_prefix(ln) + "invalid number in column '" + std::string(kNames[k]) +
                                            "': '" + std::string(field) + "'");
            }
            v[k - 1] = *parsed;
        }
        if (has_null) {
            ++result.dropped_rows;
            continue;
        }

        RawOhlcvRecord rec{*date, v[0], v[1], v[2], v[3], v[4], v[5]};
        if (rec.volume < 0.0) {
            fail(ErrorKind::Data, line_prefix(ln) + "negative volume");
        }
        if (!(rec.low <= std::min(rec.open, rec.close) && std::max(rec.open, rec.close) <= rec.high)) {
            fail(ErrorKind::Data, line_prefix(ln) + "prices violate low <= open/close <= high");
        }
        result.records.push_back(rec);
    }

    std::stable_sort(result.records.begin(), result.records.end(),
                     [](const RawOhlcvRecord& a, const RawOhlcvRecord& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < result.records.size(); ++i) {
        if (result.records[i].date == result.records[i - 1].date) {
            fail(ErrorKind::Format, "duplicate date " + format_iso_date(result.records[i].date));
        }
    }
    return result;
}

CaseSeries parse_jhu_cases(std::string_view csv_text) {
    std::vector<std::size_t> line_numbers;
    const auto lines = non_blank_lines(csv_text, line_numbers);
    if (lines.empty()) {
        fail(ErrorKind::Format, "missing header row");
    }
    const auto header = split_csv_line(lines.front());
    static constexpr std::array<std::string_view, 4> kLeading = {"Province/State", "Country/Region", "Lat", "Long"};
    for (std::size_t k = 0; k < kLeading.size(); ++k) {
        if (header.size() <= k || trim(header[k]) != kLeading[k]) {
            fail(ErrorKind::Format, "header is missing column '" + std::string(kLeading[k]) + "'");
        }
    }
    if (header.size() == kLeading.size()) {
        fail(ErrorKind::Format, "header has no date columns");
    }

    CaseSeries series;
    for (std::size_t c = kLeading.size(); c < header.size(); ++c) {
        const auto d = parse_us_short_date(header[c]);
        if (!d) {
            fail(ErrorKind::Format, "invalid date in header: '" + header[c] + "'");
        }
        if (!series.dates.empty()) {
            if (*d <= series.dates.back()) {
                fail(ErrorKind::Format, "non-monotonic dates in header at '" + header[c] + "'");
            }
            if (*d - series.dates.back() != std::chrono::days{1}) {
                fail(ErrorKind::Format, "header dates are not contiguous at '" + header[c] + "'");
            }
        }
        series.dates.push_back(*d);
    }

    series.confirmed.assign(series.dates.size(), 0);
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::size_t ln = line_numbers[r];
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != header.size()) {
            fail(ErrorKind::Format, line_prefix(ln) + "expected " + std::to_string(header.size()) + " fields, got " +
                                        std::to_string(fields.size()));
        }
        for (std::size_t c = kLeading.size(); c < fields.size(); ++c) {
            const auto field = trim(fields[c]);
            std::int64_t value = 0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
                fail(ErrorKind::Format, line_prefix(ln) + "invalid count '" + std::string(field) + "'");
            }
            if (value < 0) {
                fail(ErrorKind::Data, line_prefix(ln) + "negative count " + std::to_string(value));
            }
            series.confirmed[c - kLeading.size()] += value;
        }
    }
    for (std::size_t i = 1; i < series.confirmed.size(); ++i) {
        if (series.confirmed[i] < series.confirmed[i - 1]) {
            fail(ErrorKind::Data, "global cumulative count decreases on " + format_iso_date(series.dates[i]));
        }
    }
    return series;
}

PriceSeries close_prices(std::string name, const std::vector<RawOhlcvRecord>& records) {
    PriceSeries s;
    s.name = std::move(name);
    s.dates.reserve(records.size());
    s.close.reserve(records.size());
    for (const auto& r : records) {
        s.dates.push_back(r.date);
        s.close.push_back(r.close);
    }
    return s;
}

std::size_t TimeSeriesFrame::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == name) {
            return i;
        }
    }
    fail(ErrorKind::Usage, "unknown column '" + std::string(name) + "'");
}

std::vector<double> TimeSeriesFrame::column(std::string_view name) const {
    const auto c = static_cast<Eigen::Index>(column_index(name));
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
        out[r] = values(static_cast<Eigen::Index>(r), c);
    }
    return out;
}

TimeSeriesFrame TimeSeriesFrame::slice_rows(std::size_t first, std::size_t count) const {
    require(first + count <= rows(), ErrorKind::Usage, "row slice out of range");
    TimeSeriesFrame out;
    out.columns = columns;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                     dates.begin() + static_cast<std::ptrdiff_t>(first + count));
    out.values = values.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count));
    return out;
}

TimeSeriesFrame align(const std::vector<PriceSeries>& prices, const CaseSeries& cases) {
    require(!prices.empty(), ErrorKind::Alignment, "no price series to align");
    std::set<std::string> names;
    for (const auto& p : prices) {
        require(!p.dates.empty(), ErrorKind::Alignment, "price series '" + p.name + "' is empty");
        require(p.dates.size() == p.close.size(), ErrorKind::Alignment, "price series '" + p.name + "' is ragged");
        require(std::is_sorted(p.dates.begin(), p.dates.end()), ErrorKind::Alignment,
                "price series '" + p.name + "' is not chronological");
        require(names.insert(p.name).second && p.name != kCasesColumn, ErrorKind::Usage,
                "duplicate column name '" + p.name + "'");
    }

    std::vector<Date> common = prices.front().dates;
    for (std::size_t s = 1; s < prices.size(); ++s) {
        std::vector<Date> next;
        std::set_intersection(common.begin(), common.end(), prices[s].dates.begin(), prices[s].dates.end(),
                              std::back_inserter(next));
        common = std::move(next);
    }
    require(!common.empty(), ErrorKind::Alignment, "price series share no trading dates");

    TimeSeriesFrame frame;
    frame.dates = common;
    for (const auto& p : prices) {
        frame.columns.push_back(p.name);
    }
    frame.columns.emplace_back(kCasesColumn);
    frame.values.resize(static_cast<Eigen::Index>(common.size()), static_cast<Eigen::Index>(frame.columns.size()));

    for (std::size_t s = 0; s < prices.size(); ++s) {
        const auto& p = prices[s];
        for (std::size_t r = 0; r < common.size(); ++r) {
            const auto it = std::lower_bound(p.dates.begin(), p.dates.end(), common[r]);
            frame.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s)) =
                p.close[static_cast<std::size_t>(it - p.dates.begin())];
        }
    }

    const auto case_col = static_cast<Eigen::Index>(prices.size());
    for (std::size_t r = 0; r < common.size(); ++r) {
        double value = 0.0;
        if (!cases.dates.empty() && common[r] >= cases.dates.front()) {
            const auto it = std::upper_bound(cases.dates.begin(), cases.dates.end(), common[r]);
            value = static_cast<double>(cases.confirmed[static_cast<std::size_t>(it - cases.dates.begin()) - 1]);
        }
        frame.values(static_cast<Eigen::Index>(r), case_col) = value;
    }
    return frame;
}

std::string frame_to_csv(const TimeSeriesFrame& frame) {
    std::string out = "date";
    for (const auto& c : frame.columns) {
        out += ',';
        out += c;
    }
    out += '\n';
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out += format_iso_date(frame.dates[r]);
        for (std::size_t c = 0; c < frame.cols(); ++c) {
            out += ',';
            out += format_double(frame.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
        }
        out += '\n';
    }
    return out;
}

TimeSeriesFrame frame_from_csv(std::string_view csv_text) {
    std::vector<std::size_t> line_numbers;
    const auto lines = non_blank_lines(csv_text, line_numbers);
    if (lines.empty()) {
        fail(ErrorKind::Format, "missing header row");
    }
    const auto header = split_csv_line(lines.front());
    if (header.empty() || trim(header.front()) != "date") {
        fail(ErrorKind::Format, "header is missing column 'date'");
    }
    require(header.size() >= 2, ErrorKind::Format, "frame has no value columns");

    TimeSeriesFrame frame;
    for (std::size_t c = 1; c < header.size(); ++c) {
        frame.columns.emplace_back(trim(header[c]));
    }
    const std::size_t n = lines.size() - 1;
    frame.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(frame.columns.size()));
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const std::size_t ln = line_numbers[r];
        const auto fields = split_csv_line(lines[r]);
        if (fields.size() != header.size()) {
            fail(ErrorKind::Format, line_prefix(ln) + "expected " + std::to_string(header.size()) + " fields");
        }
        const auto d = parse_iso_date(fields[0]);
        if (!d) {
            fail(ErrorKind::Format, line_prefix(ln) + "invalid date '" + fields[0] + "'");
        }
        if (!frame.dates.empty() && *d <= frame.dates.back()) {
            fail(ErrorKind::Format, line_prefix(ln) + "dates must be strictly increasing");
        }
        frame.dates.push_back(*d);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            const auto v = parse_double(fields[c]);
            if (!v || !std::isfinite(*v)) {
                fail(ErrorKind::Format, line_prefix(ln) + "invalid number '" + fields[c] + "'");
            }
            frame.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) = *v;
        }
    }
    return frame;
}

DescriptiveStats descriptive_stats(std::span<const double> column) {
    require(column.size() >= 2, ErrorKind::Data, "descriptive statistics need at least 2 observations");

    DescriptiveStats s;
    s.min = column.front();
    s.max = column.front();
    double sum = 0.0;
    for (const double x : column) {
        require(std::isfinite(x), ErrorKind::Data, "non-finite value in column");
        sum += x;
        s.min = std::min(s.min, x);
        s.max = std::max(s.max, x);
    }
    const double n = static_cast<double>(column.size());
    // Mean kept as head + tail: deviations from a mean rounded to double lose
    // digits in the odd moments when the spread is tiny next to the level.
    const double head = sum / n;
    double residual = 0.0;
    for (const double x : column) residual += x - head;
    const double tail = residual / n;
    const double mean = head + tail;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const double x : column) {
        const double d = (x - head) - tail, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    require(m2 > 0.0, ErrorKind::Data, "zero variance: skewness and kurtosis are undefined");

    const double pm2 = m2 / n;
    s.n = column.size();
    s.mean = mean;
    s.std_dev = std::sqrt(m2 / (n - 1.0));
    s.skewness = (m3 / n) / std::pow(pm2, 1.5);
    s.kurtosis = (m4 / n) / (pm2 * pm2);
    return s;
}

std::size_t ScalerParams::index_of(std::string_view column) const {
    require(fitted(), ErrorKind::State, "scaler used before fit");
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i] == column) {
            return i;
        }
    }
    fail(ErrorKind::Usage, "scaler has no column '" + std::string(column) + "'");
}

ScalerParams fit_scaler(const TimeSeriesFrame& frame, const std::vector<std::string>& columns) {
    require(!columns.empty(), ErrorKind::Usage, "no columns to scale");
    require(frame.rows() > 0, ErrorKind::Data, "cannot fit scaler on an empty frame");
    ScalerParams p;
    for (const auto& name : columns) {
        const auto c = static_cast<Eigen::Index>(frame.column_index(name));
        const double lo = frame.values.col(c).minCoeff();
        const double hi = frame.values.col(c).maxCoeff();
        require(hi > lo, ErrorKind::Data, "cannot scale constant column '" + name + "'");
        p.columns.push_back(name);
        p.min.push_back(lo);
        p.max.push_back(hi);
    }
    return p;
}

double scale_value(const ScalerParams& params, std::string_view column, double x) {
    const auto i = params.index_of(column);
    return (x - params.min[i]) / (params.max[i] - params.min[i]);
}

double invert_value(const ScalerParams& params, std::string_view column, double scaled) {
    const auto i = params.index_of(column);
    return scaled * (params.max[i] - params.min[i]) + params.min[i];
}

TimeSeriesFrame apply_scaler(const ScalerParams& params, const TimeSeriesFrame& frame) {
    require(params.fitted(), ErrorKind::State, "scaler used before fit");
    TimeSeriesFrame out = frame;
    for (std::size_t i = 0; i < params.columns.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(frame.column_index(params.columns[i]));
        out.values.col(c) = (frame.values.col(c).array() - params.min[i]) / (params.max[i] - params.min[i]);
    }
    return out;
}

TimeSeriesFrame invert_scaler(const ScalerParams& params, const TimeSeriesFrame& frame) {
    require(params.fitted(), ErrorKind::State, "scaler inverted before fit");
    TimeSeriesFrame out = frame;
    for (std::size_t i = 0; i < params.columns.size(); ++i) {
        const auto c = static_cast<Eigen::Index>(frame.column_index(params.columns[i]));
        out.values.col(c) = frame.values.col(c).array() * (params.max[i] - params.min[i]) + params.min[i];
    }
    return out;
}

std::pair<TimeSeriesFrame, TimeSeriesFrame> chronological_split(const TimeSeriesFrame& frame, double train_fraction,
                                                                std::size_t min_partition_rows) {
    require(train_fraction > 0.0 && train_fraction < 1.0, ErrorKind::Usage, "train fraction must be in (0, 1)");
    const std::size_t n = frame.rows();
    // The epsilon keeps products like 0.57 * 100 from flooring to 56.
    const auto train_rows = static_cast<std::size_t>(std::floor(static_cast<double>(n) * train_fraction + 1e-9));
    const std::size_t test_rows = n - train_rows;
    if (train_rows < min_partition_rows || test_rows < min_partition_rows) {
        fail(ErrorKind::Data, "split of " + std::to_string(n) + " rows gives partitions of " +
                                  std::to_string(train_rows) + "/" + std::to_string(test_rows) +
                                  " rows, need at least " + std::to_string(min_partition_rows) + " each");
    }
    return {frame.slice_rows(0, train_rows), frame.slice_rows(train_rows, test_rows)};
}

TimeSeriesFrame concat_rows(const TimeSeriesFrame& head, const TimeSeriesFrame& tail) {
    require(head.columns == tail.columns, ErrorKind::Usage, "cannot concatenate frames with different columns");
    TimeSeriesFrame out;
    out.columns = head.columns;
    out.dates = head.dates;
    out.dates.insert(out.dates.end(), tail.dates.begin(), tail.dates.end());
    out.values.resize(head.values.rows() + tail.values.rows(), head.values.cols());
    out.values << head.values, tail.values;
    return out;
}

WindowedDataset make_windows(const Eigen::MatrixXd& features, std::span<const double> target, std::size_t lookback,
                             std::size_t horizon, std::string target_column) {
    require(lookback >= 1 && horizon >= 1, ErrorKind::Usage, "lookback and horizon must be positive");
    const auto rows = static_cast<std::size_t>(features.rows());
    require(target.size() == rows, ErrorKind::Usage, "target length does not match feature rows");
    require(rows >= lookback + horizon, ErrorKind::Data,
            "window error: " + std::to_string(rows) + " rows cannot hold lookback " + std::to_string(lookback) +
                " + horizon " + std::to_string(horizon));

    WindowedDataset ds;
    ds.lookback = lookback;
    ds.horizon = horizon;
    ds.num_features = static_cast<std::size_t>(features.cols());
    ds.num_samples = rows - lookback - horizon + 1;
    ds.target_column = std::move(target_column);
    ds.inputs.resize(ds.num_samples * lookback * ds.num_features);
    ds.targets.resize(ds.num_samples * horizon);
    for (std::size_t i = 0; i < ds.num_samples; ++i) {
        for (std::size_t t = 0; t < lookback; ++t) {
            for (std::size_t f = 0; f < ds.num_features; ++f) {
                ds.inputs[(i * lookback + t) * ds.num_features + f] =
                    features(static_cast<Eigen::Index>(i + t), static_cast<Eigen::Index>(f));
            }
        }
        for (std::size_t h = 0; h < horizon; ++h) {
            ds.targets[i * horizon + h] = target[i + lookback + h];
        }
    }
    return ds;
}

WindowedDataset make_windows(const TimeSeriesFrame& frame, std::size_t lookback, std::size_t horizon,
                             const std::string& target_column) {
    const auto target = frame.column(target_column);
    return make_windows(frame.values, target, lookback, horizon, target_column);
}

}  // namespace wavecast
