#include "core/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/common.hpp"

namespace setarw {

void validate_estimator_config(const EstimatorConfig& cfg) {
  if (!(cfg.a < cfg.b) || !std::isfinite(cfg.a) || !std::isfinite(cfg.b))
    fail(errc::invalid_argument, "estimator: window requires finite a < b");
  if (cfg.D < 1) fail(errc::invalid_argument, "estimator: delay bound D must be >= 1");
  if (cfg.p < 1 || cfg.p > cfg.D)
    fail(errc::invalid_argument, strfmt("estimator: order p=%d must lie in 1..D=%d", cfg.p, cfg.D));
  if (cfg.j_star < 1) fail(errc::invalid_argument, "estimator: j_star must be >= 1");
  if (cfg.j_n < 1) fail(errc::invalid_argument, "estimator: j_n must be >= 1");
  if (cfg.delta_override && !(*cfg.delta_override > 0.0))
    fail(errc::invalid_argument, "estimator: delta override must be positive");
  if (cfg.N_override && *cfg.N_override < 2)
    fail(errc::invalid_argument, "estimator: N override must be >= 2");
  if (!(cfg.populated_floor >= 0.0 && cfg.populated_floor <= 1.0))
    fail(errc::invalid_argument, "estimator: populated floor must lie in [0, 1]");
}

EstimatorConfig estimator_config_from(const ConfigDoc& doc, const std::vector<double>& values,
                                      const SetarModel* model) {
  EstimatorConfig cfg;
  long long D_fallback = model ? model->delay_bound : 0;
  cfg.D = static_cast<int>(doc.get_int_or("estimator", "delay_bound", D_fallback));
  if (cfg.D < 1)
    fail(errc::parse_error, "config: estimator.delay_bound missing and no model supplies it");
  long long p_fallback = model ? std::max(model->order(), 1) : 1;
  cfg.p = static_cast<int>(doc.get_int_or("estimator", "order", p_fallback));

  std::vector<std::string> win = split_tokens(doc.get_or("estimator", "window", "quantile 0.05 0.95"));
  if (win.size() == 3 && win[0] == "quantile") {
    if (values.empty()) fail(errc::invalid_argument, "estimator: quantile window needs data");
    cfg.a = quantile(values, parse_real(win[1], "estimator.window"));
    cfg.b = quantile(values, parse_real(win[2], "estimator.window"));
  } else if (win.size() == 3 && win[0] == "fixed") {
    cfg.a = parse_real(win[1], "estimator.window");
    cfg.b = parse_real(win[2], "estimator.window");
  } else {
    fail(errc::parse_error,
         "config: estimator.window wants 'quantile <lo> <hi>' or 'fixed <a> <b>'");
  }

  cfg.j_star = static_cast<int>(doc.get_int_or("estimator", "j_star", 2));
  if (doc.has("estimator", "delta")) cfg.delta_override = doc.get_real("estimator", "delta");
  if (doc.has("estimator", "grid_n")) cfg.N_override = doc.get_int("estimator", "grid_n");
  std::string policy = doc.get_or("estimator", "empty_policy", "drop-and-renormalize");
  if (policy == "drop-and-renormalize")
    cfg.empty_policy = EmptyPolicy::drop_and_renormalize;
  else if (policy == "nearest-fallback")
    cfg.empty_policy = EmptyPolicy::nearest_fallback;
  else
    fail(errc::parse_error, strfmt("config: unknown empty_policy '%s'", policy.c_str()));
  cfg.populated_floor = doc.get_real_or("estimator", "populated_floor", 0.5);
  cfg.full_grid = doc.get_flag_or("estimator", "full_grid", false);
  validate_estimator_config(cfg);
  return cfg;
}

namespace {

// floor(n^(1/e)) computed exactly: the float estimate is corrected with
// overflow-safe integer power comparisons (pow alone can round across the
// integer boundary, e.g. at n = 2^(e) exactly).
bool ipow_greater(long long base, int e, long long limit) {
  long long acc = 1;
  for (int i = 0; i < e; ++i) {
    if (base != 0 && acc > limit / base) return true;
    acc *= base;
  }
  return acc > limit;
}

long long integer_root(long long n, int e) {
  long long r = static_cast<long long>(std::floor(std::pow(static_cast<double>(n), 1.0 / e)));
  if (r < 0) r = 0;
  while (r > 0 && ipow_greater(r, e, n)) --r;
  while (!ipow_greater(r + 1, e, n)) ++r;
  return r;
}

}  // namespace

GridParams grid_params(long long n, const EstimatorConfig& cfg) {
  validate_estimator_config(cfg);
  if (n < cfg.D + 2)
    fail(errc::invalid_argument, strfmt("grid: need n >= D+2 = %d, got %lld", cfg.D + 2, n));
  GridParams g;
  int e = cfg.D + 2;
  g.delta = cfg.delta_override ? *cfg.delta_override
                               : std::pow(static_cast<double>(n), -1.0 / static_cast<double>(e));
  g.N = cfg.N_override ? *cfg.N_override : integer_root(n, e);
  if (g.N < 2)
    fail(errc::estimation_error,
         strfmt("grid: N = %lld < 2, series too short for the window (n = %lld, D = %d)", g.N, n,
                cfg.D));
  g.s.resize(static_cast<size_t>(g.N));
  for (long long i = 1; i <= g.N; ++i)
    g.s[static_cast<size_t>(i - 1)] =
        cfg.a + static_cast<double>(i) * (cfg.b - cfg.a) / static_cast<double>(g.N);
  return g;
}

LagVector build_lag_vector(const std::vector<double>& x, long long l, int i,
                           const EstimatorConfig& cfg) {
  if (i < 1 || i > cfg.D)
    fail(errc::invalid_argument, strfmt("lag vector: candidate lag %d outside 1..%d", i, cfg.D));
  long long need = std::max(cfg.p, i);
  if (l < need || l >= static_cast<long long>(x.size()))
    fail(errc::invalid_argument,
         strfmt("lag vector: origin %lld out of range [%lld, %zu)", l, need, x.size()));
  LagVector v;
  v.l = l;
  v.i = i;
  v.coords.resize(static_cast<size_t>(cfg.D));
  for (int c = 1; c <= cfg.D; ++c) {
    double val;
    if (c <= cfg.p)
      val = x[static_cast<size_t>(l - c)];
    else if (c == i)
      val = x[static_cast<size_t>(l - i)];
    else
      val = cfg.a;
    v.coords[static_cast<size_t>(c - 1)] = val;
  }
  return v;
}

ProjectionIndex build_projection_index(const std::vector<double>& x, const EstimatorConfig& cfg) {
  validate_estimator_config(cfg);
  ProjectionIndex idx;
  long long n = static_cast<long long>(x.size());
  for (long long l = cfg.D; l < n; ++l)
    idx.by_first.emplace_back(x[static_cast<size_t>(l - 1)], l);
  std::sort(idx.by_first.begin(), idx.by_first.end());
  return idx;
}

namespace {

// Lag-vector coordinate c (1-based) for candidate lag m, without materializing
// the vector.
inline double lag_coord(const std::vector<double>& x, long long l, int c, int m,
                        const EstimatorConfig& cfg) {
  if (c <= cfg.p) return x[static_cast<size_t>(l - c)];
  if (c == m) return x[static_cast<size_t>(l - m)];
  return cfg.a;
}

// Full ball + domination test; early-outs on the running distance.
inline bool member_test(const std::vector<double>& x, long long l, int m,
                        const std::vector<double>& T, double delta2,
                        const EstimatorConfig& cfg) {
  double dist2 = 0.0;
  for (int c = 1; c <= cfg.D; ++c) {
    double v = lag_coord(x, l, c, m, cfg);
    double t = T[static_cast<size_t>(c - 1)];
    if (v > t) return false;
    double diff = v - t;
    dist2 += diff * diff;
    if (dist2 >= delta2) return false;
  }
  return true;
}

}  // namespace

std::vector<long long> neighborhood(const std::vector<double>& x, const ProjectionIndex& index,
                                    int m, const std::vector<double>& T, double delta,
                                    const EstimatorConfig& cfg) {
  if (static_cast<int>(T.size()) != cfg.D)
    fail(errc::invalid_argument, "neighborhood: conditioning point needs D coordinates");
  std::vector<long long> out;
  if (!(delta > 0.0)) return out;
  // First coordinate is x_{l-1}: domination forces it <= T_1, the ball forces
  // it > T_1 - delta.
  auto lo = std::upper_bound(index.by_first.begin(), index.by_first.end(),
                             std::make_pair(T[0] - delta, std::numeric_limits<long long>::max()));
  auto hi = std::upper_bound(index.by_first.begin(), index.by_first.end(),
                             std::make_pair(T[0], std::numeric_limits<long long>::max()));
  double delta2 = delta * delta;
  for (auto it = lo; it != hi; ++it)
    if (member_test(x, it->second, m, T, delta2, cfg)) out.push_back(it->second);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<long long> neighborhood_brute(const std::vector<double>& x, int m,
                                          const std::vector<double>& T, double delta,
                                          const EstimatorConfig& cfg) {
  if (static_cast<int>(T.size()) != cfg.D)
    fail(errc::invalid_argument, "neighborhood: conditioning point needs D coordinates");
  std::vector<long long> out;
  if (!(delta > 0.0)) return out;
  double delta2 = delta * delta;
  long long n = static_cast<long long>(x.size());
  for (long long l = cfg.D; l < n; ++l)
    if (member_test(x, l, m, T, delta2, cfg)) out.push_back(l);
  return out;
}

std::vector<ConditioningBase> enumerate_bases(int m, double delta, const EstimatorConfig& cfg) {
  validate_estimator_config(cfg);
  if (m < 1 || m > cfg.D)
    fail(errc::invalid_argument, strfmt("bases: candidate lag %d outside 1..%d", m, cfg.D));
  long long grid_cells = 1LL << cfg.j_star;
  double step = (cfg.b - cfg.a) / static_cast<double>(grid_cells);

  // Per base slot (assembled positions except m): admissible grid indices.
  std::vector<std::vector<long long>> choices;
  for (int c = 1; c <= cfg.D; ++c) {
    if (c == m) continue;
    std::vector<long long> ks;
    bool padded = c > cfg.p;
    if (cfg.full_grid || !padded) {
      for (long long k = 0; k < grid_cells; ++k) ks.push_back(k);
    } else {
      for (long long k = 0; k < grid_cells; ++k)
        if (k == 0 || static_cast<double>(k) * step < delta) ks.push_back(k);
    }
    choices.push_back(std::move(ks));
  }

  double total = 1.0;
  for (const auto& ks : choices) total *= static_cast<double>(ks.size());
  if (total > 1e6)
    fail(errc::invalid_argument,
         strfmt("bases: %.0f conditioning points exceed the enumeration cap", total));

  std::vector<ConditioningBase> out;
  std::vector<size_t> odo(choices.size(), 0);
  for (;;) {
    ConditioningBase base;
    base.id = static_cast<long long>(out.size());
    for (size_t slot = 0; slot < choices.size(); ++slot) {
      long long k = choices[slot][odo[slot]];
      base.grid_idx.push_back(k);
      base.coords.push_back(cfg.a + static_cast<double>(k) * step);
    }
    out.push_back(std::move(base));
    size_t slot = choices.size();
    while (slot > 0) {
      --slot;
      if (++odo[slot] < choices[slot].size()) break;
      odo[slot] = 0;
      if (slot == 0) return out;
    }
    if (choices.empty()) return out;  // single empty-product base
  }
}

std::vector<double> conditioning_point(const std::vector<double>& base, int m, double s) {
  std::vector<double> T(base.size() + 1);
  for (int c = 0; c < m - 1; ++c) T[static_cast<size_t>(c)] = base[static_cast<size_t>(c)];
  T[static_cast<size_t>(m - 1)] = s;
  for (size_t c = static_cast<size_t>(m); c < T.size(); ++c) T[c] = base[c - 1];
  return T;
}

namespace {

struct BaseCells {
  std::vector<double> mu;          // per grid point i (valid where contributing)
  std::vector<char> contributing;  // has a response value
  long long populated = 0;         // strictly nonempty neighborhoods
};

BaseCells resolve_cells(const std::vector<double>& x, const ProjectionIndex& index, int m,
                        const std::vector<double>& base, const EstimatorConfig& cfg,
                        const GridParams& grid, const ResponseMean& mean_hook) {
  BaseCells cells;
  size_t N = grid.s.size();
  cells.mu.assign(N, 0.0);
  cells.contributing.assign(N, 0);
  for (size_t i = 0; i < N; ++i) {
    std::vector<double> T = conditioning_point(base, m, grid.s[i]);
    std::vector<long long> members = neighborhood(x, index, m, T, grid.delta, cfg);
    if (!members.empty()) {
      ++cells.populated;
      cells.contributing[i] = 1;
      if (mean_hook) {
        cells.mu[i] = mean_hook(x, members, T);
      } else {
        double sum = 0.0;
        for (long long l : members) sum += x[static_cast<size_t>(l)];
        cells.mu[i] = sum / static_cast<double>(members.size());
      }
      continue;
    }
    if (cfg.empty_policy == EmptyPolicy::nearest_fallback) {
      // Closest dominated lag vector within 2 delta; ties to the smaller l.
      double radius = 2.0 * grid.delta;
      auto lo = std::upper_bound(
          index.by_first.begin(), index.by_first.end(),
          std::make_pair(T[0] - radius, std::numeric_limits<long long>::max()));
      auto hi = std::upper_bound(index.by_first.begin(), index.by_first.end(),
                                 std::make_pair(T[0], std::numeric_limits<long long>::max()));
      double limit2 = radius * radius;
      double best2 = limit2;
      long long best_l = -1;
      for (auto it = lo; it != hi; ++it) {
        long long l = it->second;
        double dist2 = 0.0;
        bool dominated = true;
        for (int c = 1; c <= cfg.D && dominated; ++c) {
          double v = lag_coord(x, l, c, m, cfg);
          double t = T[static_cast<size_t>(c - 1)];
          if (v > t) dominated = false;
          double diff = v - t;
          dist2 += diff * diff;
        }
        if (!dominated || dist2 >= limit2 || dist2 > best2) continue;
        if (dist2 < best2 || best_l < 0 || l < best_l) {
          best2 = dist2;
          best_l = l;
        }
      }
      if (best_l >= 0) {
        cells.contributing[i] = 1;
        cells.mu[i] = mean_hook ? mean_hook(x, {best_l}, T) : x[static_cast<size_t>(best_l)];
      }
    }
  }
  return cells;
}

// Assembles W for one (j, k) from resolved cells; shared by the single-cell
// entry point and the surface builder.
CellResult assemble_cell(const BaseCells& cells, int j, long long k, const EstimatorConfig& cfg,
                         const GridParams& grid, const WaveletSpec& psi) {
  CellResult r;
  size_t N = grid.s.size();
  r.populated_fraction = static_cast<double>(cells.populated) / static_cast<double>(N);
  r.absent = cells.populated == 0;
  if (r.absent) return r;
  PeriodicWindow win{cfg.a, cfg.b, j, k};
  double sum = 0.0;
  long long dead = 0;  // dropped cells whose kernel weight is nonzero
  for (size_t i = 0; i < N; ++i) {
    double w = eval_psi_per(psi, win, grid.s[i]);
    if (cells.contributing[i])
      sum += w * cells.mu[i];
    else if (w != 0.0)
      ++dead;
  }
  if (cfg.empty_policy == EmptyPolicy::drop_and_renormalize) {
    long long n_eff = static_cast<long long>(N) - dead;
    r.W = n_eff > 0 ? (cfg.b - cfg.a) / static_cast<double>(n_eff) * sum : 0.0;
  } else {
    r.W = (cfg.b - cfg.a) / static_cast<double>(N) * sum;
  }
  if (!std::isfinite(r.W)) fail(errc::internal_error, "empirical wavelet: non-finite W");
  return r;
}

}  // namespace

CellResult empirical_wavelet(const std::vector<double>& x, const ProjectionIndex& index, int m,
                             int j, long long k, const std::vector<double>& base,
                             const EstimatorConfig& cfg, const GridParams& grid,
                             const WaveletSpec& psi, const ResponseMean& mean_hook) {
  validate_estimator_config(cfg);
  if (static_cast<int>(base.size()) != cfg.D - 1)
    fail(errc::invalid_argument, "empirical wavelet: base needs D-1 coordinates");
  BaseCells cells = resolve_cells(x, index, m, base, cfg, grid, mean_hook);
  return assemble_cell(cells, j, k, cfg, grid, psi);
}

Surface build_surface(const std::vector<double>& x, int m, const EstimatorConfig& cfg,
                      const GridParams& grid, const WaveletSpec& psi,
                      const ResponseMean& mean_hook) {
  validate_estimator_config(cfg);
  if (static_cast<long long>(x.size()) < cfg.D + 2)
    fail(errc::invalid_argument,
         strfmt("surface: need n >= D+2 = %d, got %zu", cfg.D + 2, x.size()));
  Surface surf;
  surf.m = m;
  surf.j = cfg.j_n;
  surf.bases = enumerate_bases(m, grid.delta, cfg);
  ProjectionIndex index = build_projection_index(x, cfg);
  long long cells_k = 1LL << cfg.j_n;
  bool any_present = false;
  for (const ConditioningBase& base : surf.bases) {
    BaseCells cells = resolve_cells(x, index, m, base.coords, cfg, grid, mean_hook);
    for (long long k = 0; k < cells_k; ++k) {
      CellResult r = assemble_cell(cells, cfg.j_n, k, cfg, grid, psi);
      SurfaceEntry e;
      e.k = k;
      e.base_id = base.id;
      e.W = r.W;
      e.populated_fraction = r.populated_fraction;
      e.absent = r.absent;
      e.low_confidence = r.populated_fraction < cfg.populated_floor;
      surf.entries.push_back(e);
      any_present = any_present || !r.absent;
    }
  }
  if (!any_present)
    fail(errc::estimation_error,
         strfmt("surface: window [%g, %g] does not intersect the data's range", cfg.a, cfg.b));
  return surf;
}

std::string surfaces_to_csv(const std::vector<Surface>& surfaces, const EstimatorConfig& cfg) {
  std::ostringstream out;
  out << "# schema: setarw-surface/1\n";
  out << "m,j,k,location,base_id,W,populated_fraction\n";
  for (const Surface& s : surfaces) {
    double cell = (cfg.b - cfg.a) / static_cast<double>(1LL << s.j);
    for (const SurfaceEntry& e : s.entries) {
      if (e.absent) continue;
      double location = cfg.a + static_cast<double>(e.k) * cell;
      out << s.m << ',' << s.j << ',' << e.k << ',' << fmt_g17(location) << ',' << e.base_id
          << ',' << fmt_g17(e.W) << ',' << fmt_g17(e.populated_fraction) << '\n';
    }
  }
  return out.str();
}

std::string surfaces_bases_csv(const std::vector<Surface>& surfaces) {
  std::ostringstream out;
  out << "# schema: setarw-bases/1\n";
  out << "m,base_id,coords\n";
  for (const Surface& s : surfaces) {
    for (const ConditioningBase& b : s.bases) {
      out << s.m << ',' << b.id << ',';
      for (size_t c = 0; c < b.coords.size(); ++c) {
        if (c) out << ' ';
        out << fmt_g17(b.coords[c]);
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace setarw
