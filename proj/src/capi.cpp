#include "setarw.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core/baseline.hpp"
#include "core/common.hpp"
#include "core/config.hpp"
#include "core/detector.hpp"
#include "core/estimator.hpp"
#include "core/setar.hpp"
#include "core/wavelet.hpp"

struct setarw_model {
  setarw::SetarModel m;
};

struct setarw_series {
  setarw::SeriesSample s;
};

struct setarw_wavelet {
  setarw::WaveletSpec spec;
};

struct setarw_report {
  setarw::DetectionReport rep;
  std::vector<setarw::Surface> surfaces;
  setarw::EstimatorConfig est;  // resolved config the surfaces were built with
  bool has_surfaces = false;
  double lambda_grid_step = 0.0;
};

namespace {

thread_local std::string g_last_error;

// Strings cross the C boundary as malloc'd copies so setarw_string_free can
// release them with free() regardless of the library's allocator.
char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) setarw::fail(setarw::errc::internal_error, "out of memory");
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename Fn>
setarw_status guarded(Fn&& fn) {
  try {
    fn();
    return SETARW_OK;
  } catch (const setarw::error& e) {
    g_last_error = e.what();
    return static_cast<setarw_status>(static_cast<int>(e.code()));
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SETARW_INTERNAL_ERROR;
  }
}

setarw_status arg_error(const char* what) {
  g_last_error = what;
  return SETARW_INVALID_ARGUMENT;
}

std::string read_file(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) setarw::fail(setarw::errc::io_error, setarw::strfmt("cannot open %s", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) setarw::fail(setarw::errc::io_error, setarw::strfmt("read failed on %s", path));
  return buf.str();
}

}  // namespace

extern "C" {

const char* setarw_last_error(void) { return g_last_error.c_str(); }

void setarw_string_free(char* s) { std::free(s); }

setarw_status setarw_model_parse(const char* config_text, setarw_model** out) {
  if (!config_text || !out) return arg_error("setarw_model_parse: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_model>();
    h->m = setarw::model_from_config(setarw::parse_config(config_text));
    *out = h.release();
  });
}

setarw_status setarw_model_load(const char* path, setarw_model** out) {
  if (!path || !out) return arg_error("setarw_model_load: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_model>();
    h->m = setarw::model_from_config(setarw::load_config(path));
    *out = h.release();
  });
}

setarw_status setarw_model_format(const setarw_model* model, char** out) {
  if (!model || !out) return arg_error("setarw_model_format: null argument");
  return guarded([&] { *out = dup_string(setarw::model_to_config(model->m)); });
}

int setarw_model_delay(const setarw_model* model) { return model ? model->m.delay : 0; }

int setarw_model_threshold_count(const setarw_model* model) {
  return model ? static_cast<int>(model->m.thresholds.size()) : 0;
}

double setarw_model_threshold(const setarw_model* model, int i) {
  if (!model || i < 0 || i >= static_cast<int>(model->m.thresholds.size())) return std::nan("");
  return model->m.thresholds[static_cast<size_t>(i)];
}

void setarw_model_free(setarw_model* model) { delete model; }

setarw_status setarw_simulate(const setarw_model* model, long long n, long long seed,
                              int burn_in, setarw_series** out) {
  if (!model || !out) return arg_error("setarw_simulate: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_series>();
    h->s = setarw::simulate(model->m, n, seed, burn_in);
    *out = h.release();
  });
}

setarw_status setarw_series_load(const char* path, setarw_series** out) {
  if (!path || !out) return arg_error("setarw_series_load: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_series>();
    h->s = setarw::series_from_csv(read_file(path));
    *out = h.release();
  });
}

setarw_status setarw_series_save(const setarw_series* series, const char* path) {
  if (!series || !path) return arg_error("setarw_series_save: null argument");
  return guarded([&] {
    std::ofstream outf(path, std::ios::binary);
    if (!outf)
      setarw::fail(setarw::errc::io_error, setarw::strfmt("cannot open %s for writing", path));
    outf << setarw::series_to_csv(series->s);
    outf.flush();
    if (!outf)
      setarw::fail(setarw::errc::io_error, setarw::strfmt("write failed on %s", path));
  });
}

setarw_status setarw_series_values(const setarw_series* series, const double** values,
                                   long long* n) {
  if (!series || !values || !n) return arg_error("setarw_series_values: null argument");
  *values = series->s.values.data();
  *n = static_cast<long long>(series->s.values.size());
  return SETARW_OK;
}

void setarw_series_free(setarw_series* series) { delete series; }

setarw_status setarw_wavelet_default(setarw_wavelet** out) {
  if (!out) return arg_error("setarw_wavelet_default: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_wavelet>();
    h->spec = setarw::default_wavelet();
    *out = h.release();
  });
}

setarw_status setarw_wavelet_detector_default(setarw_wavelet** out) {
  if (!out) return arg_error("setarw_wavelet_detector_default: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_wavelet>();
    h->spec = setarw::detector_default_wavelet();
    *out = h.release();
  });
}

setarw_status setarw_wavelet_build(double A, double right_center, double right_width,
                                   double right_amplitude, double left1_center,
                                   double left1_width, double left2_center,
                                   double left2_width, setarw_wavelet** out) {
  if (!out) return arg_error("setarw_wavelet_build: null argument");
  return guarded([&] {
    auto h = std::make_unique<setarw_wavelet>();
    h->spec = setarw::build_wavelet(A, {right_center, right_width, right_amplitude},
                                    {left1_center, left1_width, 0.0},
                                    {left2_center, left2_width, 0.0});
    *out = h.release();
  });
}

setarw_status setarw_wavelet_from_config(const char* config_text,
                                         const setarw_wavelet* fallback,
                                         setarw_wavelet** out) {
  if (!config_text || !out) return arg_error("setarw_wavelet_from_config: null argument");
  return guarded([&] {
    setarw::WaveletSpec fb = fallback ? fallback->spec : setarw::default_wavelet();
    auto h = std::make_unique<setarw_wavelet>();
    h->spec = setarw::wavelet_from_config(setarw::parse_config(config_text), fb);
    *out = h.release();
  });
}

double setarw_wavelet_eval(const setarw_wavelet* psi, double x) {
  if (!psi) return std::nan("");
  return setarw::eval_psi(psi->spec, x);
}

setarw_status setarw_wavelet_validation_report(const setarw_wavelet* psi, char** out) {
  if (!psi || !out) return arg_error("setarw_wavelet_validation_report: null argument");
  return guarded([&] { *out = dup_string(setarw::validation_report(psi->spec)); });
}

void setarw_wavelet_free(setarw_wavelet* psi) { delete psi; }

setarw_status setarw_detect(const setarw_series* series, const setarw_model* model,
                            const char* config_text, const setarw_wavelet* psi,
                            int want_surfaces, setarw_report** out) {
  if (!series || !out) return arg_error("setarw_detect: null argument");
  return guarded([&] {
    setarw::ConfigDoc doc = setarw::parse_config(config_text ? config_text : "");
    const setarw::SetarModel* m = model ? &model->m : nullptr;
    setarw::EstimatorConfig est = setarw::estimator_config_from(doc, series->s.values, m);
    setarw::DetectorConfig det = setarw::detector_config_from(doc);
    setarw::WaveletSpec spec =
        psi ? psi->spec : setarw::wavelet_from_config(doc, setarw::detector_default_wavelet());
    auto h = std::make_unique<setarw_report>();
    h->rep = setarw::detect(series->s.values, est, det, spec,
                            want_surfaces ? &h->surfaces : nullptr);
    h->has_surfaces = want_surfaces != 0;
    h->est = est;
    h->est.j_n = h->rep.j_n;
    *out = h.release();
  });
}

setarw_status setarw_detect_grid_aic(const setarw_series* series, const setarw_model* model,
                                     const char* config_text, setarw_report** out) {
  if (!series || !out) return arg_error("setarw_detect_grid_aic: null argument");
  return guarded([&] {
    setarw::ConfigDoc doc = setarw::parse_config(config_text ? config_text : "");
    const setarw::SetarModel* m = model ? &model->m : nullptr;
    setarw::EstimatorConfig est = setarw::estimator_config_from(doc, series->s.values, m);
    setarw::BaselineConfig cfg = setarw::baseline_config_from(doc);
    auto h = std::make_unique<setarw_report>();
    h->rep = setarw::detect_grid_aic(series->s.values, est, cfg, &h->lambda_grid_step);
    h->est = est;
    *out = h.release();
  });
}

setarw_status setarw_report_to_json(const setarw_report* report, char** out) {
  if (!report || !out) return arg_error("setarw_report_to_json: null argument");
  return guarded([&] { *out = dup_string(setarw::report_to_json(report->rep)); });
}

int setarw_report_d_hat(const setarw_report* report) { return report ? report->rep.d_hat : 0; }

int setarw_report_r_hat(const setarw_report* report) { return report ? report->rep.r_hat : 0; }

int setarw_report_j_n(const setarw_report* report) { return report ? report->rep.j_n : 0; }

long long setarw_report_n(const setarw_report* report) { return report ? report->rep.n : 0; }

double setarw_report_a(const setarw_report* report) { return report ? report->rep.a : 0.0; }

double setarw_report_b(const setarw_report* report) { return report ? report->rep.b : 0.0; }

double setarw_report_contrast(const setarw_report* report) {
  return report ? report->rep.contrast : 0.0;
}

int setarw_report_low_contrast(const setarw_report* report) {
  return report && report->rep.low_contrast ? 1 : 0;
}

double setarw_report_lambda_hat(const setarw_report* report, int i) {
  if (!report || i < 0 || i >= static_cast<int>(report->rep.thresholds.size()))
    return std::nan("");
  return report->rep.thresholds[static_cast<size_t>(i)].lambda_hat;
}

int setarw_report_lag_count(const setarw_report* report) {
  return report ? static_cast<int>(report->rep.per_lag_score.size()) : 0;
}

double setarw_report_per_lag_score(const setarw_report* report, int m) {
  if (!report || m < 1 || m > static_cast<int>(report->rep.per_lag_score.size()))
    return std::nan("");
  return report->rep.per_lag_score[static_cast<size_t>(m - 1)];
}

double setarw_report_lambda_grid_step(const setarw_report* report) {
  return report ? report->lambda_grid_step : 0.0;
}

int setarw_report_warning_count(const setarw_report* report) {
  return report ? static_cast<int>(report->rep.warnings.size()) : 0;
}

setarw_status setarw_report_warning(const setarw_report* report, int i, char** out) {
  if (!report || !out) return arg_error("setarw_report_warning: null argument");
  if (i < 0 || i >= static_cast<int>(report->rep.warnings.size()))
    return arg_error("setarw_report_warning: index out of range");
  return guarded([&] { *out = dup_string(report->rep.warnings[static_cast<size_t>(i)]); });
}

setarw_status setarw_report_surfaces_csv(const setarw_report* report, char** out) {
  if (!report || !out) return arg_error("setarw_report_surfaces_csv: null argument");
  if (!report->has_surfaces)
    return arg_error("setarw_report_surfaces_csv: report carries no surfaces; detect with "
                     "want_surfaces");
  return guarded([&] { *out = dup_string(setarw::surfaces_to_csv(report->surfaces, report->est)); });
}

setarw_status setarw_report_bases_csv(const setarw_report* report, char** out) {
  if (!report || !out) return arg_error("setarw_report_bases_csv: null argument");
  if (!report->has_surfaces)
    return arg_error("setarw_report_bases_csv: report carries no surfaces; detect with "
                     "want_surfaces");
  return guarded([&] { *out = dup_string(setarw::surfaces_bases_csv(report->surfaces)); });
}

void setarw_report_free(setarw_report* report) { delete report; }

}  // extern "C"
