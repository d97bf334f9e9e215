#ifndef SETARW_H
#define SETARW_H

/* C interface to the setarw core: SETAR simulation, wavelet-based delay and
 * threshold detection, and the grid/AIC baseline.
 *
 * Conventions:
 *   - Every fallible call returns a setarw_status; SETARW_OK is 0.  On
 *     failure the out-parameters are untouched and setarw_last_error()
 *     returns a message describing the failure (thread-local, valid until
 *     the next failing call on the same thread).
 *   - Handles are opaque; release them with the matching *_free function.
 *     Passing NULL to a *_free function is a no-op.
 *   - Strings returned through char** out-parameters are heap copies owned
 *     by the caller; release them with setarw_string_free.
 */

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SETARW_API __declspec(dllexport)
#else
#define SETARW_API __attribute__((visibility("default")))
#endif

typedef enum setarw_status {
  SETARW_OK = 0,
  SETARW_INVALID_ARGUMENT = 1,
  SETARW_PARSE_ERROR = 2,
  SETARW_SIMULATION_ERROR = 3,
  SETARW_ESTIMATION_ERROR = 4,
  SETARW_IO_ERROR = 5,
  SETARW_INTERNAL_ERROR = 6
} setarw_status;

typedef struct setarw_model setarw_model;
typedef struct setarw_series setarw_series;
typedef struct setarw_wavelet setarw_wavelet;
typedef struct setarw_report setarw_report;

/* Message for the most recent failure on the calling thread ("" if none). */
SETARW_API const char* setarw_last_error(void);

SETARW_API void setarw_string_free(char* s);

/* ---- model ----
 * Models are described in sectioned key-value text ([model] section with
 * regimeN.intercept / regimeN.coeffs / regimeN.noise keys, thresholds,
 * delay, delay_bound). */
SETARW_API setarw_status setarw_model_parse(const char* config_text, setarw_model** out);
SETARW_API setarw_status setarw_model_load(const char* path, setarw_model** out);
/* Renders the model back to config text (round-trips through parse). */
SETARW_API setarw_status setarw_model_format(const setarw_model* model, char** out);
SETARW_API int setarw_model_delay(const setarw_model* model);
SETARW_API int setarw_model_threshold_count(const setarw_model* model);
/* i-th threshold, 0-based ascending; NaN when i is out of range. */
SETARW_API double setarw_model_threshold(const setarw_model* model, int i);
SETARW_API void setarw_model_free(setarw_model* model);

/* ---- simulation and series I/O ---- */
SETARW_API setarw_status setarw_simulate(const setarw_model* model, long long n,
                                         long long seed, int burn_in, setarw_series** out);
SETARW_API setarw_status setarw_series_load(const char* path, setarw_series** out);
SETARW_API setarw_status setarw_series_save(const setarw_series* series, const char* path);
/* Borrowed view of the sample values; valid while the series handle lives. */
SETARW_API setarw_status setarw_series_values(const setarw_series* series,
                                              const double** values, long long* n);
SETARW_API void setarw_series_free(setarw_series* series);

/* ---- wavelet ---- */
SETARW_API setarw_status setarw_wavelet_default(setarw_wavelet** out);
SETARW_API setarw_status setarw_wavelet_detector_default(setarw_wavelet** out);
/* Builds from geometry: right bump (center, full width, amplitude) on (1, A),
 * two left bumps (center, full width) on (-A, -1) whose amplitudes are solved
 * from the two vanishing-moment conditions. */
SETARW_API setarw_status setarw_wavelet_build(double A, double right_center,
                                              double right_width, double right_amplitude,
                                              double left1_center, double left1_width,
                                              double left2_center, double left2_width,
                                              setarw_wavelet** out);
/* Builds from a config's [wavelet] section (A, right = "center width
 * amplitude", left1/left2 = "center width"); a missing section clones the
 * fallback (NULL fallback means the module default). */
SETARW_API setarw_status setarw_wavelet_from_config(const char* config_text,
                                                    const setarw_wavelet* fallback,
                                                    setarw_wavelet** out);
/* psi(x); exact 0 for |x| <= 1 and |x| >= A.  NULL handle returns NaN. */
SETARW_API double setarw_wavelet_eval(const setarw_wavelet* psi, double x);
/* Key-value moment verification text (the `validate` command body). */
SETARW_API setarw_status setarw_wavelet_validation_report(const setarw_wavelet* psi,
                                                          char** out);
SETARW_API void setarw_wavelet_free(setarw_wavelet* psi);

/* ---- detection ----
 * config_text holds [estimator] / [detector] / [baseline] / [wavelet]
 * sections; NULL or "" means all defaults.  model supplies fallback order
 * and delay bound when the config omits them; pass NULL when unknown.
 * A non-NULL psi overrides any [wavelet] section.  want_surfaces != 0
 * retains the per-lag W surfaces on the report for CSV export. */
SETARW_API setarw_status setarw_detect(const setarw_series* series,
                                       const setarw_model* model,
                                       const char* config_text,
                                       const setarw_wavelet* psi, int want_surfaces,
                                       setarw_report** out);
SETARW_API setarw_status setarw_detect_grid_aic(const setarw_series* series,
                                                const setarw_model* model,
                                                const char* config_text,
                                                setarw_report** out);

/* ---- report accessors ----
 * The scalar accessors return 0 / NaN-free defaults on a NULL handle so
 * callers can chain them; prefer checking the detect status first. */
SETARW_API setarw_status setarw_report_to_json(const setarw_report* report, char** out);
SETARW_API int setarw_report_d_hat(const setarw_report* report);
SETARW_API int setarw_report_r_hat(const setarw_report* report);
SETARW_API int setarw_report_j_n(const setarw_report* report);
SETARW_API long long setarw_report_n(const setarw_report* report);
SETARW_API double setarw_report_a(const setarw_report* report);
SETARW_API double setarw_report_b(const setarw_report* report);
SETARW_API double setarw_report_contrast(const setarw_report* report);
/* 1 when the delay identification fell below the contrast floor. */
SETARW_API int setarw_report_low_contrast(const setarw_report* report);
/* i-th estimated threshold, 0-based; NaN when i is out of range. */
SETARW_API double setarw_report_lambda_hat(const setarw_report* report, int i);
/* Number of candidate lags scored (the delay bound D). */
SETARW_API int setarw_report_lag_count(const setarw_report* report);
/* Peak score for lag m (1-based); NaN when m is out of range or the lag
 * failed (grid-aic infeasible fits). */
SETARW_API double setarw_report_per_lag_score(const setarw_report* report, int m);
/* grid-aic only: the larger gap between the winning lambda and its grid
 * neighbors (0 for wavelet reports and degenerate grids). */
SETARW_API double setarw_report_lambda_grid_step(const setarw_report* report);
SETARW_API int setarw_report_warning_count(const setarw_report* report);
SETARW_API setarw_status setarw_report_warning(const setarw_report* report, int i,
                                               char** out);
/* Surface CSV plus the base-id sidecar; requires want_surfaces at detect
 * time (grid-aic reports and surface-free reports fail with
 * SETARW_INVALID_ARGUMENT). */
SETARW_API setarw_status setarw_report_surfaces_csv(const setarw_report* report, char** out);
SETARW_API setarw_status setarw_report_bases_csv(const setarw_report* report, char** out);
SETARW_API void setarw_report_free(setarw_report* report);

#ifdef __cplusplus
}
#endif

#endif /* SETARW_H */
