#include "baseline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "common.hpp"
#include "setar.hpp"

namespace setarw {

namespace {

// Gaussian elimination with partial pivoting on the normal equations; the
// systems are (p_l + 1) square, typically 2x2.
std::vector<double> solve_normal(std::vector<std::vector<double>> A, std::vector<double> b,
                                 int regime) {
  const size_t n = b.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    if (std::fabs(A[piv][col]) < 1e-12 * (1.0 + std::fabs(A[col][col])))
      fail(errc::estimation_error,
           strfmt("cls_fit: regime %d has singular normal equations", regime + 1));
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    for (size_t r = col + 1; r < n; ++r) {
      double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> out(n, 0.0);
  for (size_t row = n; row-- > 0;) {
    double acc = b[row];
    for (size_t c = row + 1; c < n; ++c) acc -= A[row][c] * out[c];
    out[row] = acc / A[row][row];
  }
  return out;
}

long long regime_of(const std::vector<double>& thresholds, double v) {
  // (lambda_{l-1}, lambda_l] intervals: boundary values fall left.
  return std::lower_bound(thresholds.begin(), thresholds.end(), v) - thresholds.begin();
}

}  // namespace

GridFit cls_fit(const std::vector<double>& x, int d, const std::vector<double>& thresholds,
                const std::vector<int>& orders) {
  if (d < 1) fail(errc::invalid_argument, "cls_fit: d must be at least 1");
  if (orders.size() != thresholds.size() + 1)
    fail(errc::invalid_argument, "cls_fit: orders must have one entry per regime");
  if (!std::is_sorted(thresholds.begin(), thresholds.end()))
    fail(errc::invalid_argument, "cls_fit: thresholds must be sorted");
  int p_max = 0;
  for (int p : orders) {
    if (p < 0) fail(errc::invalid_argument, "cls_fit: negative AR order");
    p_max = std::max(p_max, p);
  }
  const long long n = static_cast<long long>(x.size());
  const long long start = std::max<long long>(p_max, d);
  const long long n_eff = n - start;
  if (n_eff < 1)
    fail(errc::invalid_argument,
         strfmt("cls_fit: series of length %lld leaves no observation after lag %lld", n, start));

  const size_t r1 = orders.size();
  std::vector<std::vector<long long>> members(r1);
  for (long long t = start; t < n; ++t)
    members[static_cast<size_t>(regime_of(thresholds, x[static_cast<size_t>(t - d)]))]
        .push_back(t);

  GridFit fit;
  fit.d = d;
  fit.thresholds = thresholds;
  fit.n_eff = n_eff;
  fit.coeffs.resize(r1);
  long long param_count = static_cast<long long>(thresholds.size());
  for (size_t l = 0; l < r1; ++l) {
    const int p = orders[l];
    const size_t dim = static_cast<size_t>(p) + 1;
    param_count += static_cast<long long>(dim);
    if (static_cast<long long>(members[l].size()) < p + 2)
      fail(errc::estimation_error,
           strfmt("cls_fit: regime %zu has %zu observations; needs at least p + 2 = %d",
                  l + 1, members[l].size(), p + 2));
    std::vector<std::vector<double>> A(dim, std::vector<double>(dim, 0.0));
    std::vector<double> b(dim, 0.0);
    for (long long t : members[l]) {
      std::vector<double> row(dim, 1.0);
      for (int c = 1; c <= p; ++c) row[static_cast<size_t>(c)] = x[static_cast<size_t>(t - c)];
      double y = x[static_cast<size_t>(t)];
      for (size_t i = 0; i < dim; ++i) {
        b[i] += row[i] * y;
        for (size_t j = 0; j < dim; ++j) A[i][j] += row[i] * row[j];
      }
    }
    fit.coeffs[l] = solve_normal(std::move(A), std::move(b), static_cast<int>(l));
    for (long long t : members[l]) {
      double pred = fit.coeffs[l][0];
      for (int c = 1; c <= p; ++c)
        pred += fit.coeffs[l][static_cast<size_t>(c)] * x[static_cast<size_t>(t - c)];
      double resid = x[static_cast<size_t>(t)] - pred;
      fit.rss += resid * resid;
    }
  }
  fit.aic = (fit.rss > 0.0)
                ? static_cast<double>(n_eff) *
                          std::log(fit.rss / static_cast<double>(n_eff)) +
                      2.0 * static_cast<double>(param_count)
                : -std::numeric_limits<double>::infinity();
  return fit;
}

namespace {

bool better(const GridFit& a, const GridFit& b) {
  if (a.aic != b.aic) return a.aic < b.aic;
  if (a.d != b.d) return a.d < b.d;
  return a.thresholds < b.thresholds;
}

// Strictly increasing r-tuples from the (sorted, deduplicated) grid, visited
// in lexicographic order.
void for_each_tuple(const std::vector<double>& grid, size_t r,
                    const std::function<void(const std::vector<double>&)>& visit) {
  std::vector<double> tuple(r, 0.0);
  std::vector<size_t> idx(r, 0);
  if (r == 0) {
    visit(tuple);
    return;
  }
  size_t level = 0;
  idx[0] = 0;
  while (true) {
    if (idx[level] >= grid.size() - (r - 1 - level)) {
      if (level == 0) break;
      --level;
      ++idx[level];
      continue;
    }
    tuple[level] = grid[idx[level]];
    if (level + 1 == r) {
      visit(tuple);
      ++idx[level];
    } else {
      ++level;
      idx[level] = idx[level - 1] + 1;
    }
  }
}

}  // namespace

GridFit grid_search(const std::vector<double>& x, const std::vector<int>& d_candidates,
                    const std::vector<double>& lambda_grid, const std::vector<int>& orders) {
  if (d_candidates.empty()) fail(errc::invalid_argument, "grid_search: no delay candidates");
  if (orders.empty()) fail(errc::invalid_argument, "grid_search: no regime orders");
  const size_t r = orders.size() - 1;
  std::vector<double> grid = lambda_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (r > 0 && grid.size() < r)
    fail(errc::invalid_argument, "grid_search: lambda grid smaller than threshold count");

  bool found = false;
  GridFit best;
  for (int d : d_candidates) {
    for_each_tuple(grid, r, [&](const std::vector<double>& tuple) {
      GridFit fit;
      try {
        fit = cls_fit(x, d, tuple, orders);
      } catch (const error&) {
        return;  // skip infeasible candidates
      }
      if (!found || better(fit, best)) {
        best = fit;
        found = true;
      }
    });
  }
  if (!found) fail(errc::estimation_error, "grid_search: every candidate fit failed");
  return best;
}

void validate_baseline_config(const BaselineConfig& cfg) {
  if (!(cfg.q_lo > 0.0) || !(cfg.q_hi < 1.0) || !(cfg.q_lo <= cfg.q_hi))
    fail(errc::invalid_argument, "baseline: quantile range must satisfy 0 < q_lo <= q_hi < 1");
  if (!(cfg.q_step > 0.0) || !std::isfinite(cfg.q_step))
    fail(errc::invalid_argument, "baseline: q_step must be positive");
  if (cfg.r < 0) fail(errc::invalid_argument, "baseline: r must be nonnegative");
}

BaselineConfig baseline_config_from(const ConfigDoc& doc) {
  BaselineConfig cfg;
  cfg.q_lo = doc.get_real_or("baseline", "q_lo", cfg.q_lo);
  cfg.q_hi = doc.get_real_or("baseline", "q_hi", cfg.q_hi);
  cfg.q_step = doc.get_real_or("baseline", "q_step", cfg.q_step);
  cfg.r = static_cast<int>(doc.get_int_or("baseline", "r", cfg.r));
  validate_baseline_config(cfg);
  return cfg;
}

std::vector<double> lambda_grid_from(const std::vector<double>& x, const BaselineConfig& cfg) {
  validate_baseline_config(cfg);
  std::vector<double> grid;
  for (double q = cfg.q_lo; q <= cfg.q_hi + 1e-12; q += cfg.q_step)
    grid.push_back(quantile(x, std::min(q, cfg.q_hi)));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

DetectionReport detect_grid_aic(const std::vector<double>& x, const EstimatorConfig& est,
                                const BaselineConfig& cfg, double* lambda_grid_step_out) {
  validate_estimator_config(est);
  validate_baseline_config(cfg);
  std::vector<double> grid = lambda_grid_from(x, cfg);
  std::vector<int> d_candidates;
  for (int d = 1; d <= est.D; ++d) d_candidates.push_back(d);
  std::vector<int> orders(static_cast<size_t>(cfg.r) + 1, est.p);

  DetectionReport rep;
  rep.method = "grid-aic";
  rep.n = static_cast<long long>(x.size());
  rep.a = est.a;
  rep.b = est.b;
  // For grid-aic the per-lag scores are best-AIC values: the minimum wins.
  // Delays where every candidate failed carry NaN (serialized as null).
  rep.per_lag_score.assign(static_cast<size_t>(est.D),
                           std::numeric_limits<double>::quiet_NaN());
  GridFit best;
  bool found = false;
  for (int d : d_candidates) {
    try {
      GridFit fit = grid_search(x, {d}, grid, orders);
      rep.per_lag_score[static_cast<size_t>(d) - 1] = fit.aic;
      if (!found || better(fit, best)) {
        best = fit;
        found = true;
      }
    } catch (const error&) {
    }
  }
  if (!found) fail(errc::estimation_error, "grid_search: every candidate fit failed");
  rep.d_hat = best.d;
  rep.contrast = 1.0;
  rep.low_contrast = false;
  rep.r_hat = static_cast<int>(best.thresholds.size());
  for (double lambda : best.thresholds) {
    ThresholdEstimate th;
    th.lambda_hat = lambda;
    th.k_star = -1;  // not grid-indexed
    th.score = best.aic;
    th.cluster_width = 0;
    rep.thresholds.push_back(th);
  }
  rep.edge_guard = 0.0;
  rep.interior_bases = false;

  if (lambda_grid_step_out) {
    double step = 0.0;
    if (!best.thresholds.empty() && grid.size() > 1) {
      double lambda = best.thresholds.front();
      size_t i = static_cast<size_t>(
          std::lower_bound(grid.begin(), grid.end(), lambda) - grid.begin());
      if (i > 0) step = std::max(step, grid[i] - grid[i - 1]);
      if (i + 1 < grid.size()) step = std::max(step, grid[i + 1] - grid[i]);
    }
    *lambda_grid_step_out = step;
  }
  return rep;
}

}  // namespace setarw
