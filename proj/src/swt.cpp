#include "wavecast/swt.hpp"

#include "wavecast/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wavecast {

double meyer_auxiliary(double a) {
    if (a <= 0.0) {
        return 0.0;
    }
    if (a >= 1.0) {
        return 1.0;
    }
    const double a2 = a * a;
    return a2 * a2 * (35.0 - 84.0 * a + 70.0 * a2 - 20.0 * a2 * a);
}

double meyer_lowpass_response(double omega) {
    using std::numbers::pi;
    using std::numbers::sqrt2;
    const double w = std::abs(omega);
    if (w <= pi / 3.0) {
        return sqrt2;
    }
    if (w <= 2.0 * pi / 3.0) {
        return sqrt2 * std::cos(pi / 2.0 * meyer_auxiliary(3.0 * w / pi - 1.0));
    }
    return 0.0;
}

std::vector<double> quadrature_mirror(std::span<const double> lowpass) {
    const std::size_t L = lowpass.size();
    std::vector<double> g(L);
    for (std::size_t k = 0; k < L; ++k) {
        g[k] = (k % 2 == 0 ? 1.0 : -1.0) * lowpass[L - 1 - k];
    }
    return g;
}

FilterPair meyer_filters(std::size_t num_taps, std::size_t grid_size) {
    require(num_taps >= 4 && num_taps % 2 == 0, ErrorKind::Usage, "Meyer filter length must be even and >= 4");
    const bool pow2 = grid_size != 0 && (grid_size & (grid_size - 1)) == 0;
    require(pow2 && grid_size >= 4096, ErrorKind::Usage,
            "resolution error: frequency grid must be a power of two >= 4096 to resolve the transition bands");
    require(num_taps <= grid_size / 2, ErrorKind::Usage, "more taps than the frequency grid supports");

    using std::numbers::pi;
    // Half-sample delay e^{-i w/2} makes the impulse response symmetric about
    // n = 1/2, so an even number of taps can be centred on it. H is real and
    // even, which reduces the inverse DFT to a cosine sum.
    // The delay is not 2pi-periodic, so the grid runs over signed frequencies.
    std::vector<double> omega(grid_size), response(grid_size);
    for (std::size_t m = 0; m < grid_size; ++m) {
        const double w = 2.0 * pi * static_cast<double>(m) / static_cast<double>(grid_size);
        omega[m] = w <= pi ? w : w - 2.0 * pi;
        response[m] = meyer_lowpass_response(omega[m]);
    }
    const auto half = static_cast<long>(num_taps / 2);
    std::vector<double> h(num_taps);
    for (std::size_t k = 0; k < num_taps; ++k) {
        const double n = static_cast<double>(static_cast<long>(k) - half + 1) - 0.5;
        double acc = 0.0;
        for (std::size_t m = 0; m < grid_size; ++m) {
            acc += response[m] * std::cos(omega[m] * n);
        }
        h[k] = acc / static_cast<double>(grid_size);
    }

    // h <- alpha h + beta with sum(h) = sqrt(2) and |h|_2 = 1.
    const auto L = static_cast<double>(num_taps);
    double sum = 0.0, sq = 0.0;
    for (const double t : h) {
        sum += t;
        sq += t * t;
    }
    const double spread = sq - sum * sum / L;
    require(spread > 0.0, ErrorKind::Numeric, "degenerate Meyer taps");
    const double alpha = std::sqrt((1.0 - 2.0 / L) / spread);
    const double beta = (std::numbers::sqrt2 - alpha * sum) / L;
    for (double& t : h) {
        t = alpha * t + beta;
    }

    FilterPair pair;
    pair.highpass = quadrature_mirror(h);
    pair.lowpass = std::move(h);
    pair.name = "dmey";
    return pair;
}

FilterPair haar_filters() {
    FilterPair pair;
    pair.lowpass = {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
    pair.highpass = quadrature_mirror(pair.lowpass);
    pair.name = "haar";
    return pair;
}

PaddedSignal pad_periodic(std::span<const double> x, int levels) {
    require(!x.empty(), ErrorKind::Data, "cannot pad an empty signal");
    require(levels >= 1 && levels < 31, ErrorKind::Usage, "levels must be in [1, 30]");
    const std::size_t block = std::size_t{1} << levels;
    const std::size_t padded = (x.size() + block - 1) / block * block;
    PaddedSignal out;
    out.values.assign(x.begin(), x.end());
    out.pad_length = padded - x.size();
    for (std::size_t i = 0; i < out.pad_length; ++i) {
        out.values.push_back(x[i % x.size()]);
    }
    return out;
}

namespace {

std::size_t wrap(long long i, std::size_t n) {
    const auto m = static_cast<long long>(n);
    long long r = i % m;
    return static_cast<std::size_t>(r < 0 ? r + m : r);
}

// out[n] = sum_k f[k] in[n + step (k - centre)]
void analysis(std::span<const double> in, std::span<const double> f, std::size_t step, std::span<double> out) {
    const std::size_t n = in.size();
    const auto centre = static_cast<long long>(f.size() / 2) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const long long offset = static_cast<long long>(step) * (static_cast<long long>(k) - centre);
            acc += f[k] * in[wrap(static_cast<long long>(i) + offset, n)];
        }
        out[i] = acc;
    }
}

// Adjoint of `analysis`: out[m] += sum_k f[k] in[m - step (k - centre)]
void synthesis_add(std::span<const double> in, std::span<const double> f, std::size_t step, std::span<double> out) {
    const std::size_t n = in.size();
    const auto centre = static_cast<long long>(f.size() / 2) - 1;
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const long long offset = static_cast<long long>(step) * (static_cast<long long>(k) - centre);
            acc += f[k] * in[wrap(static_cast<long long>(i) - offset, n)];
        }
        out[i] += acc;
    }
}

void check_filters(const FilterPair& filters) {
    require(!filters.lowpass.empty() && filters.lowpass.size() == filters.highpass.size(), ErrorKind::Usage,
            "filter pair has mismatched or empty taps");
}

}  // namespace

SwtCoefficients swt_decompose(std::span<const double> x, const FilterPair& filters, int levels) {
    check_filters(filters);
    require(levels >= 1 && levels < 31, ErrorKind::Usage, "levels must be in [1, 30]");
    require(!x.empty(), ErrorKind::Data, "cannot decompose an empty signal");
    const std::size_t block = std::size_t{1} << levels;
    require(x.size() % block == 0, ErrorKind::Usage,
            "signal length " + std::to_string(x.size()) + " is not divisible by 2^" + std::to_string(levels));

    SwtCoefficients c;
    c.levels = levels;
    c.original_length = x.size();
    c.approx.assign(x.begin(), x.end());
    std::vector<double> next(x.size());
    for (int j = 1; j <= levels; ++j) {
        const std::size_t step = std::size_t{1} << (j - 1);
        std::vector<double> detail(x.size());
        analysis(c.approx, filters.highpass, step, detail);
        analysis(c.approx, filters.lowpass, step, next);
        c.details.push_back(std::move(detail));
        std::swap(c.approx, next);
    }
    return c;
}

SwtCoefficients swt_decompose_padded(std::span<const double> x, const FilterPair& filters, int levels) {
    const auto padded = pad_periodic(x, levels);
    auto c = swt_decompose(padded.values, filters, levels);
    c.original_length = x.size();
    c.pad_length = padded.pad_length;
    return c;
}

std::vector<double> iswt_reconstruct(const SwtCoefficients& coeffs, const FilterPair& filters) {
    check_filters(filters);
    const std::size_t n = coeffs.approx.size();
    require(coeffs.levels >= 1 && coeffs.details.size() == static_cast<std::size_t>(coeffs.levels), ErrorKind::Usage,
            "coefficient set has " + std::to_string(coeffs.details.size()) + " detail levels, expected " +
                std::to_string(coeffs.levels));
    require(n > 0 && n % (std::size_t{1} << coeffs.levels) == 0, ErrorKind::Usage,
            "coefficient length is not divisible by 2^levels");
    for (const auto& d : coeffs.details) {
        require(d.size() == n, ErrorKind::Usage, "detail length does not match approximation length");
    }
    require(coeffs.original_length + coeffs.pad_length == n, ErrorKind::Usage,
            "recorded pad does not match coefficient length");

    // Per level, solve (A^T A) x = A^T [a; d] where A stacks both analysis
    // branches. A^T A is 2I up to the filter pair's deviation from power
    // complementarity, so Richardson sweeps converge geometrically.
    std::vector<double> approx = coeffs.approx;
    std::vector<double> rhs(n), x(n), residual(n), lo(n), hi(n);
    for (int j = coeffs.levels; j >= 1; --j) {
        const std::size_t step = std::size_t{1} << (j - 1);
        const auto& detail = coeffs.details[static_cast<std::size_t>(j - 1)];
        std::fill(rhs.begin(), rhs.end(), 0.0);
        synthesis_add(approx, filters.lowpass, step, rhs);
        synthesis_add(detail, filters.highpass, step, rhs);

        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 0.5 * rhs[i];
            scale = std::max(scale, std::abs(rhs[i]));
        }
        for (int sweep = 0; sweep < 50; ++sweep) {
            analysis(x, filters.lowpass, step, lo);
            analysis(x, filters.highpass, step, hi);
            std::fill(residual.begin(), residual.end(), 0.0);
            synthesis_add(lo, filters.lowpass, step, residual);
            synthesis_add(hi, filters.highpass, step, residual);
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                residual[i] = rhs[i] - residual[i];
                worst = std::max(worst, std::abs(residual[i]));
            }
            if (worst <= 1e-15 * scale) {
                break;
            }
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += 0.5 * residual[i];
            }
        }
        approx = x;
    }
    approx.resize(coeffs.original_length);
    return approx;
}

WaveletFeatures parse_wavelet_features(std::string_view name) {
    if (name == "AD" || name == "ad") {
        return WaveletFeatures::AD;
    }
    if (name == "ADA" || name == "ada") {
        return WaveletFeatures::ADA;
    }
    fail(ErrorKind::Usage, "unknown wavelet feature mode '" + std::string(name) + "' (expected AD or ADA)");
}

FeatureMatrix decompose_frame(const TimeSeriesFrame& frame, int levels, WaveletFeatures mode,
                              const FilterPair& filters, std::string_view cases_column) {
    require(frame.rows() > 0, ErrorKind::Data, "cannot decompose an empty frame");
    if (mode == WaveletFeatures::ADA) {
        (void)frame.column_index(cases_column);
    }

    FeatureMatrix out;
    std::vector<std::vector<double>> cols;
    const std::string level_tag = std::to_string(levels);
    for (std::size_t c = 0; c < frame.cols(); ++c) {
        const auto& name = frame.columns[c];
        const auto series = frame.column(name);
        const auto coeffs = swt_decompose_padded(series, filters, levels);
        const auto trimmed = [&](const std::vector<double>& v) {
            return std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(frame.rows()));
        };
        cols.push_back(trimmed(coeffs.approx));
        out.names.push_back(name + "_cA" + level_tag);
        if (mode == WaveletFeatures::ADA && name == cases_column) {
            continue;
        }
        for (int j = 1; j <= levels; ++j) {
            cols.push_back(trimmed(coeffs.details[static_cast<std::size_t>(j - 1)]));
            out.names.push_back(name + "_cD" + std::to_string(j));
        }
    }

    out.values.resize(static_cast<Eigen::Index>(frame.rows()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out.values.col(static_cast<Eigen::Index>(c)) =
            Eigen::Map<const Eigen::VectorXd>(cols[c].data(), static_cast<Eigen::Index>(cols[c].size()));
    }
    return out;
}

}  // namespace wavecast
