#include "wavecast/wavecast.h"

#include "wavecast/checkpoint.hpp"
#include "wavecast/error.hpp"
#include "wavecast/ingest.hpp"
#include "wavecast/manifest.hpp"
#include "wavecast/pipeline.hpp"
#include "wavecast/swt.hpp"

#include <cstring>
#include <new>
#include <string>

struct wc_manifest {
    wavecast::Manifest value;
};

struct wc_frame {
    wavecast::TimeSeriesFrame value;
};

struct wc_model {
    wavecast::BdLstmModel value;
};

namespace {

thread_local std::string t_last_error;

wc_status status_of(wavecast::ErrorKind kind) {
    using wavecast::ErrorKind;
    switch (kind) {
    case ErrorKind::Usage: return WC_ERR_USAGE;
    case ErrorKind::Format:
    case ErrorKind::Data:
    case ErrorKind::Alignment: return WC_ERR_DATA;
    case ErrorKind::Io: return WC_ERR_IO;
    case ErrorKind::State: return WC_ERR_STATE;
    case ErrorKind::Numeric: return WC_ERR_NUMERIC;
    }
    return WC_ERR_INTERNAL;
}

template <typename F>
wc_status guard(F&& f) {
    try {
        t_last_error.clear();
        f();
        return WC_OK;
    } catch (const wavecast::Error& e) {
        t_last_error = std::string(wavecast::to_string(e.kind())) + " error: " + e.what();
        return status_of(e.kind());
    } catch (const std::bad_alloc&) {
        t_last_error = "out of memory";
        return WC_ERR_INTERNAL;
    } catch (const std::exception& e) {
        t_last_error = std::string("internal error: ") + e.what();
        return WC_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* p = new char[s.size() + 1];
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

void need(const void* p, const char* what) {
    wavecast::require(p != nullptr, wavecast::ErrorKind::Usage, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* wc_version(void) { return "0.1.0"; }

const char* wc_status_name(wc_status status) {
    switch (status) {
    case WC_OK: return "ok";
    case WC_ERR_USAGE: return "usage";
    case WC_ERR_DATA: return "data";
    case WC_ERR_NUMERIC: return "numeric";
    case WC_ERR_IO: return "io";
    case WC_ERR_STATE: return "state";
    case WC_ERR_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* wc_last_error(void) { return t_last_error.c_str(); }

void wc_string_free(char* s) { delete[] s; }

void wc_set_verbosity(int level) { wavecast::set_verbosity(level); }

wc_status wc_manifest_load(const char* path, wc_manifest** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new wc_manifest{wavecast::Manifest::load(path)};
    });
}

wc_status wc_manifest_parse(const char* text, const char* base_dir, wc_manifest** out) {
    return guard([&] {
        need(text, "text");
        need(out, "out");
        *out = new wc_manifest{wavecast::Manifest::parse(text, base_dir ? base_dir : ".")};
    });
}

wc_status wc_manifest_set(wc_manifest* m, const char* key, const char* value) {
    return guard([&] {
        need(m, "manifest");
        need(key, "key");
        need(value, "value");
        m->value.set(key, value);
    });
}

wc_status wc_manifest_get(const wc_manifest* m, const char* key, char** out) {
    return guard([&] {
        need(m, "manifest");
        need(key, "key");
        need(out, "out");
        const auto v = m->value.get(key);
        *out = v ? dup_string(*v) : nullptr;
    });
}

void wc_manifest_free(wc_manifest* m) { delete m; }

wc_status wc_run_command(const wc_manifest* m, const char* command, char** report) {
    return guard([&] {
        need(m, "manifest");
        need(command, "command");
        const auto r = wavecast::run_command(command, m->value);
        if (report) {
            *report = dup_string(r.report);
        }
    });
}

const char* wc_command_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const auto& n : wavecast::command_names()) {
            s += (s.empty() ? "" : " ") + n;
        }
        return s;
    }();
    return names.c_str();
}

wc_status wc_frame_load_csv(const char* path, wc_frame** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new wc_frame{wavecast::frame_from_csv(wavecast::read_text_file(path))};
    });
}

wc_status wc_frame_shape(const wc_frame* f, size_t* rows, size_t* cols) {
    return guard([&] {
        need(f, "frame");
        if (rows) *rows = f->value.rows();
        if (cols) *cols = f->value.cols();
    });
}

wc_status wc_frame_column_name(const wc_frame* f, size_t col, char** out) {
    return guard([&] {
        need(f, "frame");
        need(out, "out");
        wavecast::require(col < f->value.cols(), wavecast::ErrorKind::Usage, "column index out of range");
        *out = dup_string(f->value.columns[col]);
    });
}

wc_status wc_frame_column(const wc_frame* f, size_t col, double* out, size_t len) {
    return guard([&] {
        need(f, "frame");
        need(out, "out");
        wavecast::require(col < f->value.cols(), wavecast::ErrorKind::Usage, "column index out of range");
        wavecast::require(len == f->value.rows(), wavecast::ErrorKind::Usage, "output length must equal the row count");
        for (size_t r = 0; r < len; ++r) {
            out[r] = f->value.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col));
        }
    });
}

void wc_frame_free(wc_frame* f) { delete f; }

wc_status wc_model_load(const char* path, wc_model** out) {
    return guard([&] {
        need(path, "path");
        need(out, "out");
        *out = new wc_model{wavecast::load_checkpoint(path).model};
    });
}

wc_status wc_model_shape(const wc_model* m, size_t* input_size, size_t* horizon) {
    return guard([&] {
        need(m, "model");
        if (input_size) *input_size = static_cast<size_t>(m->value.input_size());
        if (horizon) *horizon = static_cast<size_t>(m->value.horizon());
    });
}

wc_status wc_model_predict(const wc_model* m, const double* window, size_t lookback, double* out) {
    return guard([&] {
        need(m, "model");
        need(window, "window");
        need(out, "out");
        wavecast::require(lookback >= 1, wavecast::ErrorKind::Usage, "lookback must be at least 1");
        const auto F = m->value.input_size();
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> w(
            window, static_cast<Eigen::Index>(lookback), F);
        const Eigen::VectorXd y = wavecast::model_forward(m->value, w);
        for (Eigen::Index h = 0; h < y.size(); ++h) {
            out[h] = y(h);
        }
    });
}

void wc_model_free(wc_model* m) { delete m; }

wc_status wc_descriptive_stats(const double* x, size_t n, wc_stats* out) {
    return guard([&] {
        need(x, "x");
        need(out, "out");
        const auto s = wavecast::descriptive_stats(std::span<const double>(x, n));
        *out = {s.mean, s.max, s.min, s.std_dev, s.kurtosis, s.skewness};
    });
}

wc_status wc_swt_decompose(const double* x, size_t n, int levels, double* approx, double* details) {
    return guard([&] {
        need(x, "x");
        need(approx, "approx");
        need(details, "details");
        static const auto filters = wavecast::meyer_filters();
        const auto c = wavecast::swt_decompose(std::span<const double>(x, n), filters, levels);
        std::memcpy(approx, c.approx.data(), n * sizeof(double));
        for (int j = 0; j < levels; ++j) {
            std::memcpy(details + static_cast<size_t>(j) * n, c.details[static_cast<size_t>(j)].data(),
                        n * sizeof(double));
        }
    });
}

wc_status wc_swt_reconstruct(const double* approx, const double* details, size_t n, int levels, double* out) {
    return guard([&] {
        need(approx, "approx");
        need(details, "details");
        need(out, "out");
        wavecast::require(levels >= 1, wavecast::ErrorKind::Usage, "levels must be at least 1");
        static const auto filters = wavecast::meyer_filters();
        wavecast::SwtCoefficients c;
        c.levels = levels;
        c.approx.assign(approx, approx + n);
        for (int j = 0; j < levels; ++j) {
            const double* d = details + static_cast<size_t>(j) * n;
            c.details.emplace_back(d, d + n);
        }
        c.original_length = n;
        const auto x = wavecast::iswt_reconstruct(c, filters);
        std::memcpy(out, x.data(), n * sizeof(double));
    });
}

}  // extern "C"
