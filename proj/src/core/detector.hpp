#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "estimator.hpp"
#include "wavelet.hpp"

namespace setarw {

// Knobs for turning W surfaces into a delay estimate and threshold list.
// score_floor is the null-calibration constant c: a threshold cluster must
// peak at or above score_floor * 2^(-3 j_n / 2) to be reported.
//
// edge_guard drops cells whose kernel support wraps around the window seam
// (the periodic extension has a jump there that every wrapped cell reads as
// a spurious threshold): only k in [guard, 2^j - guard] are scored. A
// negative value (the default) means auto: detect() substitutes the wavelet
// support radius A; the surface-level functions treat it as disabled. When
// the guarded range is empty (coarse scales), scoring falls back to all
// cells and detect() records a warning.
//
// interior_bases skips conditioning bases that pin a data-constrained (free)
// coordinate on the closed lower window edge. Such bases condition on the
// tail outside the analysis window, where regime leakage from adjacent lags
// is strongest; see docs/calibration.md.
struct DetectorConfig {
  double slack_max = 0.125;
  double tau = 0.5;
  double contrast_floor = 1.5;
  double score_floor = 5.0;
  double edge_guard = -1.0;
  bool interior_bases = true;
  bool thresholds_enabled = true;
};

void validate_detector_config(const DetectorConfig& cfg);

// Reads the [detector] section; missing keys keep defaults.
DetectorConfig detector_config_from(const ConfigDoc& doc);

// Detection scale: the largest j_n >= 1 keeping 2^(3 j_n) <= slack_max * N.
struct ScalePlan {
  int j_n = 1;
  long long N = 0;
  double slack = 0.0;  // 2^(3 j_n) / N
};

ScalePlan choose_scale_from(long long N, double slack_max);
ScalePlan choose_scale(long long n, const EstimatorConfig& est,
                       const DetectorConfig& det);

// Per-lag peak scores and the winning delay. Scores ignore absent and
// low-confidence surface entries, seam-wrapped cells (edge_guard) and
// window-edge bases (interior_bases); a lag with no scored entry scores 0.
struct DelayResult {
  int d_hat = 1;
  std::vector<double> per_lag_score;  // index m-1
  double contrast = 1.0;              // may be +infinity
  bool tie = false;
  bool low_contrast = false;
};

DelayResult detect_delay(const std::vector<Surface>& surfaces, const EstimatorConfig& est,
                         const DetectorConfig& cfg);

struct ThresholdEstimate {
  double lambda_hat = 0.0;
  long long k_star = 0;
  double score = 0.0;
  long long cluster_width = 0;
};

std::vector<ThresholdEstimate> detect_thresholds(const Surface& surface,
                                                 const EstimatorConfig& est,
                                                 const DetectorConfig& cfg);

struct DetectionReport {
  std::string method = "wavelet";
  long long n = 0;
  double a = 0.0;
  double b = 0.0;
  double delta = 0.0;
  long long N = 0;
  int j_n = 0;
  double slack = 0.0;
  int d_hat = 1;
  bool tie = false;
  std::vector<double> per_lag_score;
  double contrast = 1.0;
  bool low_contrast = false;
  int r_hat = 0;
  std::vector<ThresholdEstimate> thresholds;
  bool thresholds_enabled = true;
  double tau = 0.5;
  double contrast_floor = 1.5;
  double score_floor = 5.0;
  double slack_max = 0.125;
  double edge_guard = 0.0;  // resolved value (auto replaced by psi.A)
  bool interior_bases = true;
  std::vector<std::string> warnings;
};

// choose_scale -> per-lag surfaces -> delay -> thresholds, in one call.
// est.j_n is ignored; the scale comes from the slack rule.  A non-null
// surfaces_out receives the per-lag W surfaces (for CSV export).
DetectionReport detect(const std::vector<double>& x, const EstimatorConfig& est,
                       const DetectorConfig& det, const WaveletSpec& psi,
                       std::vector<Surface>* surfaces_out = nullptr);

// Stable-field-order JSON document; infinite contrast serializes as "inf".
std::string report_to_json(const DetectionReport& report);

}  // namespace setarw
