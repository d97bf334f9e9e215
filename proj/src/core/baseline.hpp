#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "detector.hpp"
#include "estimator.hpp"

namespace setarw {

// One conditional-least-squares fit at fixed (d, thresholds, orders).
// parameter count = sum_l (p_l + 1) + r; aic = n_eff ln(rss / n_eff) + 2 count
// (aic is -infinity when the fit interpolates exactly).
struct GridFit {
  int d = 1;
  std::vector<double> thresholds;            // r sorted candidate values
  std::vector<std::vector<double>> coeffs;   // per regime: intercept, then AR
  double rss = 0.0;
  long long n_eff = 0;
  double aic = 0.0;
};

// Splits observations by the regime of x_{t-d} (boundary values fall to the
// left regime) and solves ordinary least squares per regime. orders holds
// one AR order per regime (r + 1 entries). Throws when a regime receives
// fewer than p_l + 2 observations or its normal equations are singular.
GridFit cls_fit(const std::vector<double>& x, int d, const std::vector<double>& thresholds,
                const std::vector<int>& orders);

// Exhaustive AIC minimization over d_candidates x strictly increasing
// r-tuples drawn from lambda_grid (r = orders.size() - 1). Candidates that
// fail to fit are skipped; ties break toward smaller aic, then smaller d,
// then lexicographically smaller thresholds, independent of enumeration
// order. Throws when every candidate fails.
GridFit grid_search(const std::vector<double>& x, const std::vector<int>& d_candidates,
                    const std::vector<double>& lambda_grid, const std::vector<int>& orders);

// Knobs for the [baseline] section: the lambda grid is built from sample
// quantiles q_lo..q_hi in steps of q_step, and r thresholds are searched.
struct BaselineConfig {
  double q_lo = 0.10;
  double q_hi = 0.90;
  double q_step = 0.05;
  int r = 1;
};

void validate_baseline_config(const BaselineConfig& cfg);
BaselineConfig baseline_config_from(const ConfigDoc& doc);

// Sample-quantile candidate grid, sorted with exact duplicates removed.
std::vector<double> lambda_grid_from(const std::vector<double>& x, const BaselineConfig& cfg);

// Runs grid_search over d in 1..est.D with per-regime order est.p and wraps
// the winner in the detector's report shape (method "grid-aic"). Per-lag
// scores hold each delay's best aic (lower is better); detector-only fields
// are inert. lambda_grid_step_out, when non-null, receives the larger gap
// between the winning threshold and its grid neighbors (0 for r = 0).
DetectionReport detect_grid_aic(const std::vector<double>& x, const EstimatorConfig& est,
                                const BaselineConfig& cfg,
                                double* lambda_grid_step_out = nullptr);

}  // namespace setarw
