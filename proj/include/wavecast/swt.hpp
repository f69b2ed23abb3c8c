#pragma once

// Stationary (undecimated, a trous) wavelet transform with periodic boundary,
// discrete Meyer filter synthesis and the multivariate feature expansion used
// by the AD / ADA input configurations.

#include "wavecast/ingest.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wavecast {

struct FilterPair {
    std::vector<double> lowpass;
    std::vector<double> highpass;
    std::string name;
};

/// Meyer auxiliary polynomial v(a) = a^4 (35 - 84a + 70a^2 - 20a^3), clamped
/// to 0 below a = 0 and 1 above a = 1.
double meyer_auxiliary(double a);

/// Frequency response of the Meyer lowpass filter on [-pi, pi] (real, even).
double meyer_lowpass_response(double omega);

/// Discrete Meyer filter pair sampled from the analytic frequency response on a
/// grid of `grid_size` points and centre-truncated to `num_taps` taps.
/// The taps are then mapped affinely so that sum = sqrt(2) and the l2 norm is 1.
FilterPair meyer_filters(std::size_t num_taps = 62, std::size_t grid_size = 4096);

FilterPair haar_filters();

/// Builds the highpass branch g[k] = (-1)^k h[L-1-k].
std::vector<double> quadrature_mirror(std::span<const double> lowpass);

struct PaddedSignal {
    std::vector<double> values;
    std::size_t pad_length = 0;
};

/// Appends wrap-around samples until the length is a multiple of 2^levels.
PaddedSignal pad_periodic(std::span<const double> x, int levels);

struct SwtCoefficients {
    int levels = 0;
    std::vector<double> approx;                // cA_J
    std::vector<std::vector<double>> details;  // cD_1 .. cD_J
    std::size_t original_length = 0;
    std::size_t pad_length = 0;

    std::size_t padded_length() const { return approx.size(); }
};

/// Undecimated decomposition of a signal whose length is divisible by
/// 2^levels. Level j convolves circularly with the level-1 filters upsampled by
/// 2^(j-1); taps are centred so coefficients stay time aligned with the input.
SwtCoefficients swt_decompose(std::span<const double> x, const FilterPair& filters, int levels = 5);

/// pad_periodic followed by swt_decompose; the pad is recorded for the inverse.
SwtCoefficients swt_decompose_padded(std::span<const double> x, const FilterPair& filters, int levels = 5);

/// Exact inverse of swt_decompose (pad removed).
std::vector<double> iswt_reconstruct(const SwtCoefficients& coeffs, const FilterPair& filters);

enum class WaveletFeatures { AD, ADA };

WaveletFeatures parse_wavelet_features(std::string_view name);

struct FeatureMatrix {
    Eigen::MatrixXd values;  // rows = frame rows
    std::vector<std::string> names;
};

/// Expands every frame column into [cA_J, cD_1, ..., cD_J]. In ADA mode the
/// case-count column contributes cA_J only.
FeatureMatrix decompose_frame(const TimeSeriesFrame& frame, int levels, WaveletFeatures mode,
                              const FilterPair& filters, std::string_view cases_column = kCasesColumn);

}  // namespace wavecast
