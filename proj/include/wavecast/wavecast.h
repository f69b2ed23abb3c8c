#ifndef WAVECAST_WAVECAST_H
#define WAVECAST_WAVECAST_H

/* C interface to the wavecast forecasting toolkit.
 *
 * Every fallible call returns a wc_status. On failure, wc_last_error() gives a
 * one-line message for the calling thread. Strings returned through char**
 * are owned by the caller and released with wc_string_free. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(WAVECAST_BUILDING_LIBRARY)
#    define WC_API __declspec(dllexport)
#  else
#    define WC_API __declspec(dllimport)
#  endif
#else
#  define WC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum wc_status {
    WC_OK = 0,
    WC_ERR_USAGE = 1,   /* bad argument, unknown key or command */
    WC_ERR_DATA = 2,    /* malformed input or violated data invariant */
    WC_ERR_NUMERIC = 3, /* singular system, divergence, non-finite values */
    WC_ERR_IO = 4,      /* file could not be read or written */
    WC_ERR_STATE = 5,   /* call out of order */
    WC_ERR_INTERNAL = 6
} wc_status;

typedef struct wc_manifest wc_manifest;
typedef struct wc_frame wc_frame;
typedef struct wc_model wc_model;

WC_API const char* wc_version(void);
WC_API const char* wc_status_name(wc_status status);
WC_API const char* wc_last_error(void);
WC_API void wc_string_free(char* s);

/* 0 silent, 1 progress (default), 2 detail; diagnostics go to stderr. */
WC_API void wc_set_verbosity(int level);

/* Manifests */
WC_API wc_status wc_manifest_load(const char* path, wc_manifest** out);
WC_API wc_status wc_manifest_parse(const char* text, const char* base_dir, wc_manifest** out);
WC_API wc_status wc_manifest_set(wc_manifest* m, const char* key, const char* value);
/* *out is NULL when the key is absent. */
WC_API wc_status wc_manifest_get(const wc_manifest* m, const char* key, char** out);
WC_API void wc_manifest_free(wc_manifest* m);

/* Runs one batch command. `report` (may be NULL) receives a text summary. */
WC_API wc_status wc_run_command(const wc_manifest* m, const char* command, char** report);
/* Space separated list of command names. */
WC_API const char* wc_command_names(void);

/* Frames */
WC_API wc_status wc_frame_load_csv(const char* path, wc_frame** out);
WC_API wc_status wc_frame_shape(const wc_frame* f, size_t* rows, size_t* cols);
WC_API wc_status wc_frame_column_name(const wc_frame* f, size_t col, char** out);
WC_API wc_status wc_frame_column(const wc_frame* f, size_t col, double* out, size_t len);
WC_API void wc_frame_free(wc_frame* f);

/* Models */
WC_API wc_status wc_model_load(const char* path, wc_model** out);
WC_API wc_status wc_model_shape(const wc_model* m, size_t* input_size, size_t* horizon);
/* `window` is lookback x input_size, row-major; `out` receives horizon values. */
WC_API wc_status wc_model_predict(const wc_model* m, const double* window, size_t lookback, double* out);
WC_API void wc_model_free(wc_model* m);

/* Numerics */
typedef struct wc_stats {
    double mean, max, min, std_dev, kurtosis, skewness;
} wc_stats;

WC_API wc_status wc_descriptive_stats(const double* x, size_t n, wc_stats* out);

/* Undecimated decomposition with the discrete Meyer filters. n must be a
 * multiple of 2^levels. `details` holds levels rows of n values (cD1 first). */
WC_API wc_status wc_swt_decompose(const double* x, size_t n, int levels, double* approx, double* details);
WC_API wc_status wc_swt_reconstruct(const double* approx, const double* details, size_t n, int levels, double* out);

#ifdef __cplusplus
}
#endif

#endif
