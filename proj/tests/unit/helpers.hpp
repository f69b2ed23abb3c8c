#pragma once

#include "wavecast/error.hpp"
#include "wavecast/ingest.hpp"
#include "wavecast/rng.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <string>
#include <vector>

// Checks that `expr` throws wavecast::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                          \
    do {                                                               \
        bool thrown_ = false;                                          \
        try {                                                          \
            (void)(expr);                                              \
        } catch (const wavecast::Error& e_) {                          \
            thrown_ = true;                                            \
            CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());    \
        }                                                              \
        CHECK_MESSAGE(thrown_, "expected an error from " #expr);      \
    } while (0)

namespace testing {

inline std::vector<double> uniform_vector(wavecast::Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

// Box-Muller; test-side only.
inline double normal(wavecast::Rng& rng) {
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline std::vector<double> normal_vector(wavecast::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = normal(rng);
    return v;
}

inline std::vector<double> random_walk(wavecast::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    for (auto& x : v) {
        s += normal(rng);
        x = s;
    }
    return v;
}

inline double rel_err(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Weekday-dated frame with the five market columns: each price is a trend plus
// two sinusoids plus gaussian noise; covid_cases is a non-decreasing count.
inline wavecast::TimeSeriesFrame synthetic_market_frame(std::size_t rows, std::uint64_t seed, double noise = 0.02) {
    using namespace std::chrono;
    wavecast::Rng rng(seed);
    wavecast::TimeSeriesFrame f;
    f.columns = {"crude_oil", "dji", "sp500", "nasdaq", "covid_cases"};
    f.values.resize(static_cast<Eigen::Index>(rows), 5);
    sys_days d = year{2012} / January / 2;
    const double base[4] = {60.0, 20000.0, 2500.0, 7000.0};
    const double period1[4] = {50.0, 80.0, 65.0, 45.0};
    const double period2[4] = {13.0, 17.0, 11.0, 19.0};
    double cases = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (weekday{d}.c_encoding() == 0 || weekday{d}.c_encoding() == 6) d += days{1};
        f.dates.push_back(d);
        d += days{1};
        const double t = static_cast<double>(r);
        for (int c = 0; c < 4; ++c) {
            const double shape = 1.0 + 0.3 * t / static_cast<double>(rows) + 0.1 * std::sin(2.0 * M_PI * t / period1[c]) +
                                 0.05 * std::sin(2.0 * M_PI * t / period2[c] + c) + noise * normal(rng);
            f.values(static_cast<Eigen::Index>(r), c) = base[c] * shape;
        }
        if (r > rows / 2) cases += std::floor(1.0 + 0.02 * static_cast<double>(r - rows / 2) * (1.0 + rng.uniform()));
        f.values(static_cast<Eigen::Index>(r), 4) = cases;
    }
    return f;
}

}  // namespace testing
