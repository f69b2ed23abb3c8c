#include "wavecast/stationarity.hpp"

#include "wavecast/error.hpp"

#include <cmath>
#include <limits>

namespace wavecast {

std::array<double, 3> critical_values(Deterministic deterministic) {
    if (deterministic == Deterministic::Intercept) {
        return {-3.431479, -2.861924, -2.567017};
    }
    return {-3.959877, -3.410705, -3.127138};
}

std::vector<double> difference(std::span<const double> series) {
    require(series.size() >= 2, ErrorKind::Data, "differencing needs at least 2 observations");
    std::vector<double> out(series.size() - 1);
    for (std::size_t t = 0; t + 1 < series.size(); ++t) {
        out[t] = series[t + 1] - series[t];
    }
    return out;
}

OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X) {
    const auto n = X.rows();
    const auto k = X.cols();
    require(y.size() == n, ErrorKind::Usage, "ols: response and design row counts differ");
    require(n > k, ErrorKind::Numeric, "ols: need more observations than regressors");

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k) {
        fail(ErrorKind::Numeric, "ols: design matrix is rank deficient");
    }

    OlsResult out;
    out.coefficients = qr.solve(y);
    out.residuals = y - X * out.coefficients;
    out.rss = out.residuals.squaredNorm();
    out.sigma2 = out.rss / static_cast<double>(n - k);

    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    out.standard_errors.resize(k);
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = 0; i < k; ++i) {
        out.standard_errors(perm(i)) = std::sqrt(out.sigma2 * r_inv.row(i).squaredNorm());
    }
    return out;
}

int newey_west_bandwidth(std::size_t observations) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(observations) / 100.0, 2.0 / 9.0)));
}

std::vector<double> bartlett_weights(int bandwidth) {
    require(bandwidth >= 0, ErrorKind::Usage, "bandwidth must be non-negative");
    std::vector<double> w(static_cast<std::size_t>(bandwidth));
    for (int j = 1; j <= bandwidth; ++j) {
        w[static_cast<std::size_t>(j - 1)] = 1.0 - static_cast<double>(j) / static_cast<double>(bandwidth + 1);
    }
    return w;
}

namespace {

std::vector<double> transformed(std::span<const double> series, SeriesTransform transform) {
    if (transform == SeriesTransform::FirstDifference) {
        return difference(series);
    }
    return {series.begin(), series.end()};
}

int deterministic_count(Deterministic d) { return d == Deterministic::Intercept ? 1 : 2; }

// Regression of dy[t] on [y[t], 1, (t+1), dy[t-1], ..., dy[t-lags]] for
// t = first .. dy.size()-1. Column 0 carries the lagged-level coefficient.
void build_df_regression(const std::vector<double>& y, const std::vector<double>& dy, Deterministic det, int lags,
                         std::size_t first, Eigen::VectorXd& response, Eigen::MatrixXd& design) {
    const auto rows = static_cast<Eigen::Index>(dy.size() - first);
    const int k = 1 + deterministic_count(det) + lags;
    response.resize(rows);
    design.resize(rows, k);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t t = first + static_cast<std::size_t>(r);
        response(r) = dy[t];
        design(r, 0) = y[t];
        design(r, 1) = 1.0;
        int col = 2;
        if (det == Deterministic::TrendAndIntercept) {
            design(r, col++) = static_cast<double>(t + 1);
        }
        for (int i = 1; i <= lags; ++i) {
            design(r, col++) = dy[t - static_cast<std::size_t>(i)];
        }
    }
}

void finish(UnitRootResult& result, Deterministic det) {
    result.critical_values = critical_values(det);
    for (std::size_t i = 0; i < result.critical_values.size(); ++i) {
        result.reject_at[i] = result.statistic < result.critical_values[i];
    }
    result.asymptotic_only = result.observations < 500;
    require(std::isfinite(result.statistic), ErrorKind::Numeric, "unit-root statistic is not finite");
}

}  // namespace

UnitRootResult adf_test(std::span<const double> series, const UnitRootSpec& spec) {
    require(spec.max_lags >= 0, ErrorKind::Usage, "max_lags must be non-negative");
    const auto y = transformed(series, spec.transform);
    require(y.size() >= 3, ErrorKind::Data, "series too short for the ADF regression");
    const auto dy = difference(y);

    const auto max_lags = static_cast<std::size_t>(spec.max_lags);
    const int k_max = 1 + deterministic_count(spec.deterministic) + spec.max_lags;
    if (dy.size() <= max_lags || dy.size() - max_lags <= static_cast<std::size_t>(k_max) + 1) {
        fail(ErrorKind::Data, "series too short for ADF with " + std::to_string(spec.max_lags) + " lags");
    }

    // Lag selection on the common sample available at max_lags.
    int best_lag = 0;
    if (spec.max_lags > 0) {
        double best_sic = std::numeric_limits<double>::infinity();
        Eigen::VectorXd response;
        Eigen::MatrixXd design;
        for (int p = 0; p <= spec.max_lags; ++p) {
            build_df_regression(y, dy, spec.deterministic, p, max_lags, response, design);
            const auto fit = ols(response, design);
            const double t = static_cast<double>(response.size());
            const double sic = std::log(fit.rss / t) + static_cast<double>(design.cols()) * std::log(t) / t;
            if (sic < best_sic) {
                best_sic = sic;
                best_lag = p;
            }
        }
    }

    Eigen::VectorXd response;
    Eigen::MatrixXd design;
    build_df_regression(y, dy, spec.deterministic, best_lag, static_cast<std::size_t>(best_lag), response, design);
    const auto fit = ols(response, design);

    UnitRootResult result;
    result.statistic = fit.coefficients(0) / fit.standard_errors(0);
    result.lags_or_bandwidth = best_lag;
    result.observations = static_cast<std::size_t>(response.size());
    finish(result, spec.deterministic);
    return result;
}

UnitRootResult pp_test(std::span<const double> series, const UnitRootSpec& spec) {
    const auto y = transformed(series, spec.transform);
    require(y.size() >= 20, ErrorKind::Data, "series too short for the Phillips-Perron test (need 20)");
    const auto dy = difference(y);

    Eigen::VectorXd response;
    Eigen::MatrixXd design;
    build_df_regression(y, dy, spec.deterministic, 0, 0, response, design);
    const auto fit = ols(response, design);

    const auto T = static_cast<std::size_t>(response.size());
    const int q = spec.fixed_bandwidth >= 0 ? spec.fixed_bandwidth : newey_west_bandwidth(T);
    require(static_cast<std::size_t>(q) < T, ErrorKind::Usage, "bandwidth exceeds sample size");

    const auto& e = fit.residuals;
    const double n = static_cast<double>(T);
    const double gamma0 = e.squaredNorm() / n;
    double long_run = gamma0;
    const auto weights = bartlett_weights(q);
    for (int j = 1; j <= q; ++j) {
        const auto len = static_cast<Eigen::Index>(T) - j;
        const double gamma_j = e.tail(len).dot(e.head(len)) / n;
        long_run += 2.0 * weights[static_cast<std::size_t>(j - 1)] * gamma_j;
    }
    require(long_run > 0.0, ErrorKind::Numeric, "non-positive long-run variance");

    const double t_stat = fit.coefficients(0) / fit.standard_errors(0);
    const double s = std::sqrt(fit.sigma2);
    UnitRootResult result;
    result.statistic = t_stat * std::sqrt(gamma0 / long_run) -
                       (long_run - gamma0) * n * fit.standard_errors(0) / (2.0 * std::sqrt(long_run) * s);
    result.lags_or_bandwidth = q;
    result.observations = T;
    finish(result, spec.deterministic);
    return result;
}

UnitRootResult unit_root_test(std::span<const double> series, const UnitRootSpec& spec) {
    return spec.test == UnitRootTest::Adf ? adf_test(series, spec) : pp_test(series, spec);
}

}  // namespace wavecast
