#include "detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "json.hpp"

namespace setarw {

void validate_detector_config(const DetectorConfig& cfg) {
  if (!(cfg.slack_max > 0.0) || !std::isfinite(cfg.slack_max))
    fail(errc::invalid_argument, "detector: slack_max must be positive and finite");
  if (!(cfg.tau > 0.0) || !(cfg.tau <= 1.0))
    fail(errc::invalid_argument, "detector: tau must lie in (0, 1]");
  if (!(cfg.contrast_floor >= 1.0) || !std::isfinite(cfg.contrast_floor))
    fail(errc::invalid_argument, "detector: contrast_floor must be at least 1");
  if (!(cfg.score_floor >= 0.0) || !std::isfinite(cfg.score_floor))
    fail(errc::invalid_argument, "detector: score_floor must be nonnegative and finite");
  if (std::isnan(cfg.edge_guard) || std::isinf(cfg.edge_guard))
    fail(errc::invalid_argument, "detector: edge_guard must be finite (negative = auto)");
}

DetectorConfig detector_config_from(const ConfigDoc& doc) {
  DetectorConfig cfg;
  cfg.slack_max = doc.get_real_or("detector", "slack_max", cfg.slack_max);
  cfg.tau = doc.get_real_or("detector", "tau", cfg.tau);
  cfg.contrast_floor = doc.get_real_or("detector", "contrast_floor", cfg.contrast_floor);
  cfg.score_floor = doc.get_real_or("detector", "score_floor", cfg.score_floor);
  cfg.edge_guard = doc.get_real_or("detector", "edge_guard", cfg.edge_guard);
  cfg.interior_bases = doc.get_flag_or("detector", "interior_bases", cfg.interior_bases);
  cfg.thresholds_enabled =
      doc.get_flag_or("detector", "thresholds_enabled", cfg.thresholds_enabled);
  validate_detector_config(cfg);
  return cfg;
}

// Cells with k in [ceil(g), 2^j - g] have kernel support inside the window;
// anything outside wraps around the seam. Returns false when the guarded
// range is empty, in which case callers score every cell.
static bool guarded_range(int j, double guard, long long* lo, long long* hi) {
  const long long K = 1LL << j;
  if (guard <= 0.0) {
    *lo = 0;
    *hi = K - 1;
    return true;
  }
  *lo = static_cast<long long>(std::ceil(guard));
  *hi = static_cast<long long>(std::floor(static_cast<double>(K) - guard));
  return *lo <= *hi;
}

// Marks bases whose free (data-constrained) coordinates avoid the closed
// lower window edge (grid index 0). Padded coordinates sit at the edge by
// construction and do not disqualify; synthetic bases without recorded grid
// indices are kept.
static std::vector<char> interior_mask(const Surface& surf, const EstimatorConfig& est) {
  std::vector<char> keep(surf.bases.size(), 1);
  for (size_t b = 0; b < surf.bases.size(); ++b) {
    const ConditioningBase& base = surf.bases[b];
    size_t pos = 0;
    for (int c = 1; c <= est.D && pos < base.grid_idx.size(); ++c) {
      if (c == surf.m) continue;
      if (c <= est.p && base.grid_idx[pos] == 0) keep[b] = 0;
      ++pos;
    }
  }
  return keep;
}

ScalePlan choose_scale_from(long long N, double slack_max) {
  if (N < 2) fail(errc::invalid_argument, strfmt("choose_scale: N = %lld is too small", N));
  if (!(slack_max > 0.0))
    fail(errc::invalid_argument, "choose_scale: slack_max must be positive");
  int best = 0;
  for (int j = 1; j <= 20; ++j) {
    if (std::ldexp(1.0, 3 * j) <= slack_max * static_cast<double>(N))
      best = j;
    else
      break;
  }
  if (best == 0)
    fail(errc::estimation_error,
         strfmt("choose_scale: no scale j >= 1 satisfies 2^(3 j) <= slack_max * N "
                "(N = %lld, slack_max = %.6g); use a longer series or raise slack_max",
                N, slack_max));
  ScalePlan plan;
  plan.j_n = best;
  plan.N = N;
  plan.slack = std::ldexp(1.0, 3 * best) / static_cast<double>(N);
  return plan;
}

ScalePlan choose_scale(long long n, const EstimatorConfig& est, const DetectorConfig& det) {
  validate_detector_config(det);
  GridParams grid = grid_params(n, est);
  return choose_scale_from(grid.N, det.slack_max);
}

DelayResult detect_delay(const std::vector<Surface>& surfaces, const EstimatorConfig& est,
                         const DetectorConfig& cfg) {
  validate_detector_config(cfg);
  if (surfaces.empty()) fail(errc::invalid_argument, "detect_delay: no surfaces supplied");
  DelayResult res;
  res.per_lag_score.assign(surfaces.size(), 0.0);
  for (size_t idx = 0; idx < surfaces.size(); ++idx) {
    if (surfaces[idx].m != static_cast<int>(idx) + 1)
      fail(errc::invalid_argument, "detect_delay: surfaces must be ordered by lag m = 1..D");
    long long lo = 0, hi = 0;
    if (!guarded_range(surfaces[idx].j, cfg.edge_guard, &lo, &hi)) {
      lo = 0;
      hi = (1LL << surfaces[idx].j) - 1;
    }
    std::vector<char> keep(surfaces[idx].bases.size(), 1);
    if (cfg.interior_bases) keep = interior_mask(surfaces[idx], est);
    double best = 0.0;
    for (const SurfaceEntry& e : surfaces[idx].entries) {
      if (e.absent || e.low_confidence) continue;
      if (e.k < lo || e.k > hi) continue;
      if (e.base_id >= 0 && e.base_id < static_cast<long long>(keep.size()) &&
          !keep[static_cast<size_t>(e.base_id)])
        continue;
      best = std::max(best, std::fabs(e.W));
    }
    res.per_lag_score[idx] = best;
  }
  size_t arg = 0;
  for (size_t idx = 1; idx < surfaces.size(); ++idx)
    if (res.per_lag_score[idx] > res.per_lag_score[arg]) arg = idx;
  double top = res.per_lag_score[arg];
  if (top == 0.0)
    fail(errc::estimation_error,
         "detect_delay: no lag carries a confident nonzero score; widen the window or "
         "lower populated_floor");
  res.d_hat = static_cast<int>(arg) + 1;
  for (size_t idx = arg + 1; idx < surfaces.size(); ++idx)
    if (res.per_lag_score[idx] == top) res.tie = true;
  if (surfaces.size() == 1) {
    res.contrast = 1.0;
  } else {
    double runner = 0.0;
    for (size_t idx = 0; idx < surfaces.size(); ++idx)
      if (idx != arg) runner = std::max(runner, res.per_lag_score[idx]);
    res.contrast = runner > 0.0 ? top / runner : std::numeric_limits<double>::infinity();
    res.low_contrast = res.contrast < cfg.contrast_floor;
  }
  return res;
}

std::vector<ThresholdEstimate> detect_thresholds(const Surface& surface,
                                                 const EstimatorConfig& est,
                                                 const DetectorConfig& cfg) {
  validate_detector_config(cfg);
  validate_estimator_config(est);
  const long long K = 1LL << surface.j;
  long long lo = 0, hi = 0;
  if (!guarded_range(surface.j, cfg.edge_guard, &lo, &hi)) {
    lo = 0;
    hi = K - 1;
  }
  std::vector<char> keep(surface.bases.size(), 1);
  if (cfg.interior_bases) keep = interior_mask(surface, est);
  std::vector<double> profile(static_cast<size_t>(K), 0.0);
  bool any_confident = false;
  for (const SurfaceEntry& e : surface.entries) {
    if (e.absent || e.low_confidence) continue;
    if (e.k < 0 || e.k >= K) fail(errc::internal_error, "detect_thresholds: k out of range");
    if (e.k < lo || e.k > hi) continue;
    if (e.base_id >= 0 && e.base_id < static_cast<long long>(keep.size()) &&
        !keep[static_cast<size_t>(e.base_id)])
      continue;
    any_confident = true;
    profile[static_cast<size_t>(e.k)] =
        std::max(profile[static_cast<size_t>(e.k)], std::fabs(e.W));
  }
  if (!any_confident)
    fail(errc::estimation_error,
         "detect_thresholds: the lag surface has no confident entries");
  double max_p = *std::max_element(profile.begin(), profile.end());
  if (max_p == 0.0) return {};

  std::vector<long long> selected;
  for (long long k = 0; k < K; ++k)
    if (profile[static_cast<size_t>(k)] >= cfg.tau * max_p) selected.push_back(k);

  // Peaks within one band I(s, (b-a)/2^j) of each other belong to the same
  // threshold: in index units the band spans k* +/- 1, so a gap of at most 2
  // keeps two selected indices in one cluster.
  const double step = (est.b - est.a) / static_cast<double>(K);
  const double floor_abs = cfg.score_floor * std::ldexp(1.0, -2 * surface.j) *
                           std::sqrt(std::ldexp(1.0, surface.j));
  std::vector<ThresholdEstimate> out;
  size_t i = 0;
  while (i < selected.size()) {
    size_t last = i;
    while (last + 1 < selected.size() && selected[last + 1] - selected[last] <= 2) ++last;
    long long k_star = selected[i];
    double peak = profile[static_cast<size_t>(k_star)];
    for (size_t t = i + 1; t <= last; ++t) {
      double v = profile[static_cast<size_t>(selected[t])];
      if (v > peak) {
        peak = v;
        k_star = selected[t];
      }
    }
    if (peak >= floor_abs) {
      ThresholdEstimate th;
      th.lambda_hat = est.a + static_cast<double>(k_star) * step;
      th.k_star = k_star;
      th.score = peak;
      th.cluster_width = static_cast<long long>(last - i + 1);
      out.push_back(th);
    }
    i = last + 1;
  }
  return out;
}

DetectionReport detect(const std::vector<double>& x, const EstimatorConfig& est0,
                       const DetectorConfig& det0, const WaveletSpec& psi,
                       std::vector<Surface>* surfaces_out) {
  validate_detector_config(det0);
  DetectorConfig det = det0;
  if (det.edge_guard < 0.0) det.edge_guard = psi.A;
  EstimatorConfig est = est0;
  const long long n = static_cast<long long>(x.size());
  GridParams grid = grid_params(n, est);
  ScalePlan plan = choose_scale_from(grid.N, det.slack_max);
  est.j_n = plan.j_n;
  validate_estimator_config(est);

  std::vector<Surface> surfaces;
  surfaces.reserve(static_cast<size_t>(est.D));
  for (int m = 1; m <= est.D; ++m) surfaces.push_back(build_surface(x, m, est, grid, psi));

  DelayResult delay = detect_delay(surfaces, est, det);

  DetectionReport rep;
  rep.method = "wavelet";
  rep.n = n;
  rep.a = est.a;
  rep.b = est.b;
  rep.delta = grid.delta;
  rep.N = grid.N;
  rep.j_n = plan.j_n;
  rep.slack = plan.slack;
  rep.d_hat = delay.d_hat;
  rep.tie = delay.tie;
  rep.per_lag_score = delay.per_lag_score;
  rep.contrast = delay.contrast;
  rep.low_contrast = delay.low_contrast;
  rep.thresholds_enabled = det.thresholds_enabled;
  rep.tau = det.tau;
  rep.contrast_floor = det.contrast_floor;
  rep.score_floor = det.score_floor;
  rep.slack_max = det.slack_max;
  rep.edge_guard = det.edge_guard;
  rep.interior_bases = det.interior_bases;
  if (det.thresholds_enabled) {
    rep.thresholds =
        detect_thresholds(surfaces[static_cast<size_t>(rep.d_hat) - 1], est, det);
    rep.r_hat = static_cast<int>(rep.thresholds.size());
  }
  long long glo = 0, ghi = 0;
  if (!guarded_range(plan.j_n, det.edge_guard, &glo, &ghi))
    rep.warnings.push_back(
        strfmt("edge guard %.6g leaves no cell at scale j_n = %d; scoring fell back to "
               "every cell, including seam-wrapped ones",
               det.edge_guard, plan.j_n));
  if (rep.tie)
    rep.warnings.push_back("delay score tie; the smallest tied lag is reported");
  if (rep.low_contrast)
    rep.warnings.push_back(
        strfmt("contrast %.6g is below the floor %.6g; the delay identification is "
               "unreliable",
               rep.contrast, det.contrast_floor));
  if (surfaces_out) *surfaces_out = std::move(surfaces);
  return rep;
}

std::string report_to_json(const DetectionReport& r) {
  using ojson = nlohmann::ordered_json;
  ojson j;
  j["schema"] = "setarw-report/1";
  j["method"] = r.method;
  j["n"] = r.n;
  j["window"] = ojson{{"a", r.a}, {"b", r.b}};
  j["grid"] = ojson{{"N", r.N}, {"delta", r.delta}, {"j_n", r.j_n}, {"slack", r.slack}};
  j["d_hat"] = r.d_hat;
  j["tie"] = r.tie;
  j["per_lag_score"] = r.per_lag_score;
  if (std::isinf(r.contrast))
    j["contrast"] = "inf";
  else
    j["contrast"] = r.contrast;
  j["low_contrast"] = r.low_contrast;
  j["r_hat"] = r.r_hat;
  j["thresholds"] = ojson::array();
  for (const ThresholdEstimate& t : r.thresholds)
    j["thresholds"].push_back(ojson{{"lambda_hat", t.lambda_hat},
                                    {"k_star", t.k_star},
                                    {"score", t.score},
                                    {"cluster_width", t.cluster_width}});
  j["config"] = ojson{{"tau", r.tau},
                      {"contrast_floor", r.contrast_floor},
                      {"score_floor", r.score_floor},
                      {"slack_max", r.slack_max},
                      {"edge_guard", r.edge_guard},
                      {"interior_bases", r.interior_bases},
                      {"thresholds_enabled", r.thresholds_enabled}};
  j["warnings"] = r.warnings;
  return j.dump(2) + "\n";
}

}  // namespace setarw
