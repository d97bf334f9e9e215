#include "core/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/common.hpp"
#include "core/setar.hpp"
#include "doctest.h"

using namespace setarw;

namespace {

EstimatorConfig basic_cfg(int D, int p, double a = 0.0, double b = 1.0) {
  EstimatorConfig cfg;
  cfg.a = a;
  cfg.b = b;
  cfg.D = D;
  cfg.p = p;
  cfg.j_star = 2;
  cfg.j_n = 1;
  return cfg;
}

std::vector<double> ar_series(size_t n, unsigned seed, double coef = 0.8) {
  std::mt19937 rng(seed);
  auto unit = [&] { return (static_cast<double>(rng()) / 4294967296.0) * 2.0 - 1.0; };
  std::vector<double> x(n);
  double prev = 0.0;
  for (size_t t = 0; t < n; ++t) {
    prev = coef * prev + unit();
    x[t] = prev;
  }
  return x;
}

}  // namespace

TEST_CASE("grid_params matches the closed-form examples") {
  EstimatorConfig cfg = basic_cfg(2, 1);
  GridParams g = grid_params(4096, cfg);
  CHECK(g.delta == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(g.N == 8);
  REQUIRE(g.s.size() == 8);
  for (int i = 1; i <= 8; ++i)
    CHECK(g.s[i - 1] == doctest::Approx(i / 8.0).epsilon(1e-15));
  CHECK(g.s.back() == doctest::Approx(cfg.b).epsilon(1e-15));

  // n = 2^(D+2) must land exactly on N = 2 (no float round-down).
  for (int D : {1, 2, 3, 4}) {
    EstimatorConfig c2 = basic_cfg(D, 1);
    CHECK(grid_params(1LL << (D + 2), c2).N == 2);
  }
}

TEST_CASE("grid_params integer root is exact near perfect powers") {
  for (int D : {1, 2, 3, 4}) {
    EstimatorConfig cfg = basic_cfg(D, 1);
    int e = D + 2;
    for (long long r = 2; r <= 9; ++r) {
      long long n = 1;
      for (int i = 0; i < e; ++i) n *= r;
      CHECK(grid_params(n, cfg).N == r);
      if (r - 1 >= 2) CHECK(grid_params(n - 1, cfg).N == r - 1);
      CHECK(grid_params(n + 1, cfg).N == r);
    }
  }
}

TEST_CASE("grid_params overrides and failure modes") {
  EstimatorConfig cfg = basic_cfg(2, 1);
  cfg.delta_override = 0.3;
  CHECK(grid_params(4096, cfg).delta == 0.3);
  cfg.N_override = 100;
  CHECK(grid_params(4096, cfg).N == 100);

  EstimatorConfig tight = basic_cfg(1, 1);
  CHECK_THROWS_AS(grid_params(7, tight), error);  // N = floor(7^(1/3)) = 1
  CHECK_THROWS_AS(grid_params(2, tight), error);  // n < D + 2

  EstimatorConfig bad = basic_cfg(2, 1);
  bad.b = bad.a;
  CHECK_THROWS_AS(grid_params(4096, bad), error);
  bad = basic_cfg(2, 1);
  bad.p = 3;  // p > D
  CHECK_THROWS_AS(grid_params(4096, bad), error);
}

TEST_CASE("build_lag_vector pads with the window edge") {
  std::vector<double> x(20);
  for (size_t t = 0; t < x.size(); ++t) x[t] = static_cast<double>(t) * 0.5;

  EstimatorConfig c13 = basic_cfg(3, 1, -1.0, 1.0);
  LagVector v = build_lag_vector(x, 10, 3, c13);
  CHECK(v.coords == std::vector<double>{x[9], -1.0, x[7]});

  EstimatorConfig c24 = basic_cfg(4, 2, -1.0, 1.0);
  v = build_lag_vector(x, 10, 1, c24);
  CHECK(v.coords == std::vector<double>{x[9], x[8], -1.0, -1.0});

  // p = D: every candidate lag sees the same dense window.
  EstimatorConfig c33 = basic_cfg(3, 3, -1.0, 1.0);
  for (int i = 1; i <= 3; ++i) {
    v = build_lag_vector(x, 10, i, c33);
    CHECK(v.coords == std::vector<double>{x[9], x[8], x[7]});
  }

  CHECK_THROWS_AS(build_lag_vector(x, 2, 3, c13), error);   // l < max(p, i)
  CHECK_THROWS_AS(build_lag_vector(x, 20, 1, c13), error);  // response out of range
  CHECK_THROWS_AS(build_lag_vector(x, 10, 4, c13), error);  // i > D
  CHECK_THROWS_AS(build_lag_vector(x, 10, 0, c13), error);
}

TEST_CASE("neighborhood: degenerate deltas give the empty set") {
  std::vector<double> x = ar_series(200, 1);
  EstimatorConfig cfg = basic_cfg(2, 1, -2.0, 2.0);
  ProjectionIndex idx = build_projection_index(x, cfg);
  std::vector<double> T{0.0, 0.0};
  CHECK(neighborhood(x, idx, 1, T, 0.0, cfg).empty());
  CHECK(neighborhood_brute(x, 1, T, 0.0, cfg).empty());
}

TEST_CASE("neighborhood: constant series geometry") {
  EstimatorConfig cfg = basic_cfg(3, 1, 0.5, 2.0);
  size_t n = 100;
  std::vector<double> x(n, cfg.a);
  ProjectionIndex idx = build_projection_index(x, cfg);
  double delta = 0.1;
  double off = delta / (2.0 * std::sqrt(3.0));
  std::vector<double> T{cfg.a + off, cfg.a + off, cfg.a + off};
  std::vector<long long> got = neighborhood(x, idx, 2, T, delta, cfg);
  REQUIRE(got.size() == n - static_cast<size_t>(cfg.D));
  for (size_t r = 0; r < got.size(); ++r) CHECK(got[r] == static_cast<long long>(r + 3));
  CHECK(got == neighborhood_brute(x, 2, T, delta, cfg));
}

TEST_CASE("neighborhood: indexed search equals brute force on random instances") {
  std::mt19937 rng(20260815);
  auto uni = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng()) / 4294967296.0);
  };
  for (int inst = 0; inst < 50; ++inst) {
    size_t n = 50 + rng() % 1950;
    int D = 1 + static_cast<int>(rng() % 4);
    int p = 1 + static_cast<int>(rng() % static_cast<unsigned>(D));
    EstimatorConfig cfg = basic_cfg(D, p, uni(-2.5, -0.5), uni(0.5, 2.5));
    std::vector<double> x = ar_series(n, 1000 + inst);
    ProjectionIndex idx = build_projection_index(x, cfg);
    int m = 1 + static_cast<int>(rng() % static_cast<unsigned>(D));
    double delta = uni(0.01, 0.9);
    std::vector<double> T(static_cast<size_t>(D));
    for (double& t : T) t = uni(cfg.a - 0.5, cfg.b + 0.5);
    std::vector<long long> fast = neighborhood(x, idx, m, T, delta, cfg);
    std::vector<long long> slow = neighborhood_brute(x, m, T, delta, cfg);
    CHECK(fast == slow);
  }
}

TEST_CASE("conditioning_point splices the insert coordinate") {
  std::vector<double> base{1.0, 2.0, 3.0};
  CHECK(conditioning_point(base, 1, 9.0) == std::vector<double>{9.0, 1.0, 2.0, 3.0});
  CHECK(conditioning_point(base, 2, 9.0) == std::vector<double>{1.0, 9.0, 2.0, 3.0});
  CHECK(conditioning_point(base, 4, 9.0) == std::vector<double>{1.0, 2.0, 3.0, 9.0});
}

TEST_CASE("enumerate_bases prunes padded positions by delta") {
  EstimatorConfig cfg = basic_cfg(4, 1, -1.0, 1.0);  // grid step = 0.5 at j* = 2
  // Small delta: padded slots pinned to the window edge.
  std::vector<ConditioningBase> m2 = enumerate_bases(2, 0.35, cfg);
  CHECK(m2.size() == 4);  // free slot (position 1) times pinned slots
  for (const ConditioningBase& b : m2) {
    REQUIRE(b.coords.size() == 3);
    CHECK(b.coords[1] == -1.0);  // positions 3,4 are padded
    CHECK(b.coords[2] == -1.0);
  }
  std::vector<ConditioningBase> m1 = enumerate_bases(1, 0.35, cfg);
  CHECK(m1.size() == 1);  // no free slots: positions 2,3,4 all padded

  // delta above one grid step admits index 1 on padded slots.
  std::vector<ConditioningBase> wide = enumerate_bases(1, 0.6, cfg);
  CHECK(wide.size() == 8);

  cfg.full_grid = true;
  CHECK(enumerate_bases(1, 0.35, cfg).size() == 64);  // 4^3

  EstimatorConfig d1 = basic_cfg(1, 1);
  CHECK(enumerate_bases(1, 0.1, d1).size() == 1);  // empty base
  CHECK(enumerate_bases(1, 0.1, d1)[0].coords.empty());
}

TEST_CASE("pruned-away bases have empty neighborhoods everywhere") {
  EstimatorConfig cfg = basic_cfg(3, 1, -1.5, 1.5);
  cfg.j_star = 1;
  std::vector<double> x = ar_series(400, 5);
  ProjectionIndex idx = build_projection_index(x, cfg);
  double delta = 0.4;  // below the grid step 1.5
  int m = 2;
  std::vector<ConditioningBase> pruned = enumerate_bases(m, delta, cfg);
  EstimatorConfig full_cfg = cfg;
  full_cfg.full_grid = true;
  std::vector<ConditioningBase> full = enumerate_bases(m, delta, full_cfg);
  REQUIRE(full.size() > pruned.size());

  auto contains = [&](const std::vector<double>& coords) {
    for (const ConditioningBase& b : pruned)
      if (b.coords == coords) return true;
    return false;
  };
  GridParams g = grid_params(static_cast<long long>(x.size()), cfg);
  int checked = 0;
  for (const ConditioningBase& b : full) {
    if (contains(b.coords)) continue;
    for (double s : g.s) {
      std::vector<double> T = conditioning_point(b.coords, m, s);
      CHECK(neighborhood_brute(x, m, T, delta, cfg).empty());
    }
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("empirical_wavelet: constant series reduces to the kernel Riemann sum") {
  EstimatorConfig cfg = basic_cfg(1, 1, 1.5, 2.5);
  cfg.j_n = 1;
  cfg.delta_override = 100.0;  // every neighborhood populated
  cfg.N_override = 8;
  double c = cfg.a;  // constant at the window edge keeps domination satisfied
  std::vector<double> x(300, c);
  ProjectionIndex idx = build_projection_index(x, cfg);
  GridParams g = grid_params(300, cfg);
  WaveletSpec psi = default_wavelet();

  for (long long k : {0LL, 1LL}) {
    CellResult r = empirical_wavelet(x, idx, 1, 1, k, {}, cfg, g, psi);
    CHECK_FALSE(r.absent);
    CHECK(r.populated_fraction == 1.0);
    double riemann = 0.0;
    for (double s : g.s) riemann += eval_psi_per(psi, PeriodicWindow{cfg.a, cfg.b, 1, k}, s);
    double expected = c * (cfg.b - cfg.a) / static_cast<double>(g.N) * riemann;
    CHECK(r.W == doctest::Approx(expected).epsilon(1e-12));
    // Riemann sum of a zero-mean kernel: bounded by variation / N, not zero.
    CHECK(std::fabs(r.W) <= std::fabs(c) * (cfg.b - cfg.a) * 40.0 / static_cast<double>(g.N));
  }
}

TEST_CASE("empirical_wavelet: dead kernel gives exactly zero") {
  EstimatorConfig cfg = basic_cfg(1, 1, 0.0, 1.0);
  cfg.j_n = 3;
  cfg.delta_override = 100.0;
  cfg.N_override = 4;  // s = {0.25, 0.5, 0.75, 1.0}: psi_per(3,1) vanishes on all
  std::vector<double> x(100, 0.0);
  ProjectionIndex idx = build_projection_index(x, cfg);
  GridParams g = grid_params(100, cfg);
  WaveletSpec psi = default_wavelet();
  for (double s : g.s)
    REQUIRE(eval_psi_per(psi, PeriodicWindow{0.0, 1.0, 3, 1}, s) == 0.0);
  CellResult r = empirical_wavelet(x, idx, 1, 3, 1, {}, cfg, g, psi);
  CHECK_FALSE(r.absent);
  CHECK(r.W == 0.0);
}

TEST_CASE("empirical_wavelet: affine response injection is exactly linear") {
  EstimatorConfig cfg = basic_cfg(2, 1, -1.0, 1.0);
  cfg.j_n = 2;
  std::vector<double> x = ar_series(1500, 17);
  ProjectionIndex idx = build_projection_index(x, cfg);
  GridParams g = grid_params(1500, cfg);
  WaveletSpec psi = default_wavelet();
  std::vector<ConditioningBase> bases = enumerate_bases(1, g.delta, cfg);
  REQUIRE_FALSE(bases.empty());
  const std::vector<double>& base = bases[0].coords;

  double alpha = 1.75, beta = -0.4;
  ResponseMean scaled = [&](const std::vector<double>& xs, const std::vector<long long>& mem,
                            const std::vector<double>&) {
    double sum = 0.0;
    for (long long l : mem) sum += xs[static_cast<size_t>(l)];
    return alpha * (sum / static_cast<double>(mem.size())) + beta;
  };
  ResponseMean unit_mean = [](const std::vector<double>&, const std::vector<long long>&,
                              const std::vector<double>&) {
    return 1.0;
  };
  for (long long k = 0; k < 4; ++k) {
    CellResult w = empirical_wavelet(x, idx, 1, 2, k, base, cfg, g, psi);
    CellResult wp = empirical_wavelet(x, idx, 1, 2, k, base, cfg, g, psi, scaled);
    CellResult s = empirical_wavelet(x, idx, 1, 2, k, base, cfg, g, psi, unit_mean);
    if (w.absent) continue;
    CHECK(wp.W == doctest::Approx(alpha * w.W + beta * s.W).epsilon(1e-12));
    CHECK(wp.populated_fraction == w.populated_fraction);
  }
}

TEST_CASE("affine data equivariance: neighborhoods and kernel values are preserved") {
  // Quantized data, power-of-two alpha, dyadic beta: every comparison in the
  // pipeline maps exactly, so the index sets must match exactly.
  std::vector<double> raw = ar_series(800, 23);
  std::vector<double> x(raw.size());
  for (size_t t = 0; t < raw.size(); ++t) x[t] = std::round(raw[t] * 64.0) / 64.0;
  double alpha = 2.0, beta = 0.25;
  std::vector<double> y(x.size());
  for (size_t t = 0; t < x.size(); ++t) y[t] = alpha * x[t] + beta;

  EstimatorConfig cx = basic_cfg(3, 1, -1.0, 1.0);
  cx.j_n = 2;
  cx.N_override = 8;
  cx.delta_override = 0.25;
  EstimatorConfig cy = cx;
  cy.a = alpha * cx.a + beta;
  cy.b = alpha * cx.b + beta;
  cy.delta_override = alpha * *cx.delta_override;

  GridParams gx = grid_params(800, cx), gy = grid_params(800, cy);
  ProjectionIndex ix = build_projection_index(x, cx), iy = build_projection_index(y, cy);
  WaveletSpec psi = default_wavelet();
  for (size_t i = 0; i < gx.s.size(); ++i)
    REQUIRE(gy.s[i] == alpha * gx.s[i] + beta);

  int m = 2;
  std::vector<ConditioningBase> bx = enumerate_bases(m, gx.delta, cx);
  std::vector<ConditioningBase> by = enumerate_bases(m, gy.delta, cy);
  REQUIRE(bx.size() == by.size());
  for (size_t bi = 0; bi < bx.size(); ++bi) {
    for (size_t i = 0; i < gx.s.size(); ++i) {
      std::vector<double> Tx = conditioning_point(bx[bi].coords, m, gx.s[i]);
      std::vector<double> Ty = conditioning_point(by[bi].coords, m, gy.s[i]);
      CHECK(neighborhood(x, ix, m, Tx, gx.delta, cx) == neighborhood(y, iy, m, Ty, gy.delta, cy));
      // The periodization argument (x-a)/(b-a) is scale-free, but the kernel
      // carries a (b-a)^{-1/2} normalization, so the values shrink by
      // sqrt(alpha) on the stretched window.
      PeriodicWindow wx{cx.a, cx.b, cx.j_n, 1}, wy{cy.a, cy.b, cy.j_n, 1};
      double px = eval_psi_per(psi, wx, gx.s[i]);
      double py = eval_psi_per(psi, wy, gy.s[i]);
      if (px == 0.0)
        CHECK(py == 0.0);
      else
        CHECK(py == doctest::Approx(px / std::sqrt(alpha)).epsilon(1e-15));
    }
    for (long long k = 0; k < 4; ++k) {
      CellResult wx = empirical_wavelet(x, ix, m, 2, k, bx[bi].coords, cx, gx, psi);
      CellResult wy = empirical_wavelet(y, iy, m, 2, k, by[bi].coords, cy, gy, psi);
      CHECK(wx.absent == wy.absent);
      if (wx.absent) continue;
      ResponseMean unit_mean = [](const std::vector<double>&, const std::vector<long long>&,
                                  const std::vector<double>&) {
        return 1.0;
      };
      CellResult s = empirical_wavelet(x, ix, m, 2, k, bx[bi].coords, cx, gx, psi, unit_mean);
      // Responses scale affinely and the kernel by alpha^{-1/2}, while the
      // (b-a)/N prefactor grows by alpha: W' = alpha^{3/2} W + alpha^{1/2} beta S.
      double expected = std::sqrt(alpha) * (alpha * wx.W + beta * s.W);
      CHECK(wy.W == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("the mean hook sees each contributing cell's conditioning point") {
  // Alternating 1.9/0.9 series: only lag vectors (1.9, 0.9) match the base
  // at c1 = 2, and only the grid point s = 1 dominates the second coordinate
  // within delta, so the hook fires exactly once with T = (2, 1).
  std::vector<double> x;
  for (int t = 0; t < 64; ++t) x.push_back((t % 2) ? 1.9 : 0.9);
  EstimatorConfig cfg;
  cfg.a = 0.0;
  cfg.b = 4.0;
  cfg.D = 2;
  cfg.p = 1;
  cfg.j_star = 1;
  cfg.j_n = 1;
  cfg.delta_override = 0.375;
  cfg.N_override = 4;
  GridParams g = grid_params(static_cast<long long>(x.size()), cfg);
  ProjectionIndex idx = build_projection_index(x, cfg);
  std::vector<ConditioningBase> bases = enumerate_bases(2, g.delta, cfg);
  REQUIRE(bases.size() == 2);
  REQUIRE(bases[1].coords == std::vector<double>{2.0});
  std::vector<std::vector<double>> seen;
  ResponseMean capture = [&](const std::vector<double>&, const std::vector<long long>& mem,
                             const std::vector<double>& T) {
    REQUIRE_FALSE(mem.empty());
    seen.push_back(T);
    return 0.0;
  };
  empirical_wavelet(x, idx, 2, 1, 0, bases[1].coords, cfg, g, default_wavelet(), capture);
  REQUIRE(seen.size() == 1);
  CHECK(seen[0] == std::vector<double>{2.0, 1.0});
}

TEST_CASE("empirical_wavelet: absent when the window misses the data") {
  EstimatorConfig cfg = basic_cfg(2, 1, 100.0, 101.0);
  std::vector<double> x = ar_series(300, 3);
  ProjectionIndex idx = build_projection_index(x, cfg);
  GridParams g = grid_params(300, cfg);
  CellResult r = empirical_wavelet(x, idx, 1, 1, 0, {100.0}, cfg, g, default_wavelet());
  CHECK(r.absent);
  CHECK(r.populated_fraction == 0.0);
  CHECK_THROWS_AS(build_surface(x, 1, cfg, g, default_wavelet()), error);
}

TEST_CASE("empty-cell policies: renormalization vs nearest fallback, by hand") {
  // Alternating series: lag value 0.9 predicts response 1.5 and vice versa.
  // Grid s = {1, 2, 3, 4} with delta = 0.375:
  //   s=1: populated (lag 0.9), mean response 1.5
  //   s=2: empty; closest dominated lag 1.5 at distance 0.5 < 2 delta,
  //        smallest such origin is l = 2, response x_2 = 0.9
  //   s=3, s=4: empty, nothing within 2 delta
  EstimatorConfig cfg = basic_cfg(1, 1, 0.0, 4.0);
  cfg.N_override = 4;
  cfg.delta_override = 0.375;
  std::vector<double> x{0.9, 1.5, 0.9, 1.5, 0.9, 1.5, 0.9, 1.5};
  ProjectionIndex idx = build_projection_index(x, cfg);
  GridParams g = grid_params(8, cfg);
  WaveletSpec psi = default_wavelet();

  PeriodicWindow win{0.0, 4.0, 1, 1};
  double psi1 = eval_psi_per(psi, win, 1.0);
  double psi2 = eval_psi_per(psi, win, 2.0);
  REQUIRE(psi1 != 0.0);
  REQUIRE(psi2 != 0.0);
  REQUIRE(eval_psi_per(psi, win, 3.0) == 0.0);
  REQUIRE(eval_psi_per(psi, win, 4.0) == 0.0);

  // Drop-and-renormalize: only s=1 contributes; s=2 is dropped with nonzero
  // kernel weight, shrinking the effective count to 3 (s=3, s=4 carry no
  // weight and do not count).
  CellResult drop = empirical_wavelet(x, idx, 1, 1, 1, {}, cfg, g, psi);
  CHECK(drop.populated_fraction == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(drop.absent);
  CHECK(drop.W == doctest::Approx(4.0 / 3.0 * psi1 * 1.5).epsilon(1e-13));

  // Nearest fallback: s=2 contributes the substituted response 0.9 and the
  // prefactor keeps the full grid count.
  cfg.empty_policy = EmptyPolicy::nearest_fallback;
  CellResult fb = empirical_wavelet(x, idx, 1, 1, 1, {}, cfg, g, psi);
  CHECK(fb.populated_fraction == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_FALSE(fb.absent);
  CHECK(fb.W == doctest::Approx(psi1 * 1.5 + psi2 * 0.9).epsilon(1e-13));
}

TEST_CASE("build_surface shapes, flags, and determinism") {
  SetarModel m = [] {
    SetarModel mm;
    mm.regimes.resize(2);
    mm.regimes[0].coeffs = {0.6};
    mm.regimes[1].coeffs = {-0.6};
    mm.thresholds = {0.0};
    mm.delay = 2;
    mm.delay_bound = 4;
    return mm;
  }();
  SeriesSample s = simulate(m, 3000, 21, 500);
  EstimatorConfig cfg = basic_cfg(4, 1, quantile(s.values, 0.05), quantile(s.values, 0.95));
  cfg.j_n = 3;
  cfg.N_override = 128;
  cfg.delta_override = 0.35;
  GridParams g = grid_params(3000, cfg);
  WaveletSpec psi = detector_default_wavelet();

  Surface surf = build_surface(s.values, 2, cfg, g, psi);
  CHECK(surf.m == 2);
  CHECK(surf.j == 3);
  CHECK(surf.entries.size() == surf.bases.size() * 8);
  for (const SurfaceEntry& e : surf.entries) {
    CHECK(e.k >= 0);
    CHECK(e.k < 8);
    if (!e.absent) CHECK(std::isfinite(e.W));
    CHECK(e.low_confidence == (e.populated_fraction < cfg.populated_floor));
  }

  Surface again = build_surface(s.values, 2, cfg, g, psi);
  REQUIRE(again.entries.size() == surf.entries.size());
  for (size_t i = 0; i < surf.entries.size(); ++i) {
    CHECK(again.entries[i].W == surf.entries[i].W);
    CHECK(again.entries[i].populated_fraction == surf.entries[i].populated_fraction);
  }
}

TEST_CASE("surface csv export and sidecar") {
  std::vector<double> x = ar_series(600, 9);
  EstimatorConfig cfg = basic_cfg(2, 1, -1.0, 1.0);
  cfg.j_n = 2;
  GridParams g = grid_params(600, cfg);
  std::vector<Surface> ss;
  for (int m = 1; m <= 2; ++m)
    ss.push_back(build_surface(x, m, cfg, g, default_wavelet()));
  std::string csv = surfaces_to_csv(ss, cfg);
  CHECK(csv.rfind("# schema: setarw-surface/1\n", 0) == 0);
  CHECK(csv.find("m,j,k,location,base_id,W,populated_fraction\n") != std::string::npos);
  std::string bases = surfaces_bases_csv(ss);
  CHECK(bases.rfind("# schema: setarw-bases/1\n", 0) == 0);
  CHECK(bases.find("m,base_id,coords\n") != std::string::npos);
}

TEST_CASE("estimator_config_from resolves windows and knobs") {
  std::vector<double> x = ar_series(1000, 31);
  ConfigDoc doc = parse_config(
      "[estimator]\nwindow = quantile 0.05 0.95\nj_star = 3\ndelta = 0.4\ngrid_n = 64\n"
      "empty_policy = nearest-fallback\npopulated_floor = 0.25\ndelay_bound = 3\norder = 2\n");
  EstimatorConfig cfg = estimator_config_from(doc, x, nullptr);
  CHECK(cfg.a == doctest::Approx(quantile(x, 0.05)).epsilon(1e-15));
  CHECK(cfg.b == doctest::Approx(quantile(x, 0.95)).epsilon(1e-15));
  CHECK(cfg.D == 3);
  CHECK(cfg.p == 2);
  CHECK(cfg.j_star == 3);
  CHECK(cfg.delta_override == 0.4);
  CHECK(cfg.N_override == 64);
  CHECK(cfg.empty_policy == EmptyPolicy::nearest_fallback);
  CHECK(cfg.populated_floor == 0.25);

  ConfigDoc fixed = parse_config("[estimator]\nwindow = fixed -2 2\ndelay_bound = 1\n");
  EstimatorConfig cf = estimator_config_from(fixed, x, nullptr);
  CHECK(cf.a == -2.0);
  CHECK(cf.b == 2.0);

  // No delay_bound anywhere: unresolvable.
  ConfigDoc bare = parse_config("[estimator]\nwindow = fixed -2 2\n");
  CHECK_THROWS_AS(estimator_config_from(bare, x, nullptr), error);

  // Model supplies the fallbacks.
  SetarModel m;
  m.regimes.resize(1);
  m.regimes[0].coeffs = {0.5, 0.1};
  m.delay = 1;
  m.delay_bound = 4;
  finalize_model(m);
  EstimatorConfig cm = estimator_config_from(bare, x, &m);
  CHECK(cm.D == 4);
  CHECK(cm.p == 2);
}
