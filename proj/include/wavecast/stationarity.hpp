#pragma once

// Unit-root diagnostics: augmented Dickey-Fuller with Schwarz lag selection and
// Phillips-Perron with a Bartlett-kernel long-run variance.

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace wavecast {

enum class UnitRootTest { Adf, PhillipsPerron };
enum class Deterministic { Intercept, TrendAndIntercept };
enum class SeriesTransform { Level, FirstDifference };

struct UnitRootSpec {
    UnitRootTest test = UnitRootTest::Adf;
    Deterministic deterministic = Deterministic::Intercept;
    SeriesTransform transform = SeriesTransform::Level;
    int max_lags = 31;       // ADF only
    int fixed_bandwidth = -1;  // PP only; negative selects the Newey-West rule
};

inline constexpr std::array<double, 3> kSignificanceLevels = {0.01, 0.05, 0.10};

struct UnitRootResult {
    double statistic = 0.0;
    int lags_or_bandwidth = 0;
    std::array<double, 3> critical_values{};  // 1%, 5%, 10%
    std::array<bool, 3> reject_at{};
    std::size_t observations = 0;  // observations in the final regression
    bool asymptotic_only = false;  // sample below 500: large-sample table applied anyway
};

/// Asymptotic left-tail critical values for the DF/ADF/PP t-statistic.
std::array<double, 3> critical_values(Deterministic deterministic);

std::vector<double> difference(std::span<const double> series);

struct OlsResult {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::VectorXd standard_errors;
    double rss = 0.0;
    double sigma2 = 0.0;  // rss / (n - k)
};

/// Least squares via column-pivoted QR; throws a numeric error when the design
/// matrix is rank deficient.
OlsResult ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X);

/// Newey-West automatic truncation lag floor(4 (T/100)^(2/9)).
int newey_west_bandwidth(std::size_t observations);

/// Weights 1 - j/(q+1) for j = 1..q.
std::vector<double> bartlett_weights(int bandwidth);

UnitRootResult adf_test(std::span<const double> series, const UnitRootSpec& spec);
UnitRootResult pp_test(std::span<const double> series, const UnitRootSpec& spec);

/// Dispatches on spec.test after applying spec.transform.
UnitRootResult unit_root_test(std::span<const double> series, const UnitRootSpec& spec);

}  // namespace wavecast
