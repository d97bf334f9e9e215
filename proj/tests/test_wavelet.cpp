#include "core/wavelet.hpp"

#include <cmath>
#include <vector>

#include "core/common.hpp"
#include "doctest.h"

using namespace setarw;

namespace {

// Independent quadrature oracle: plain midpoint rule over a callable.  Kept
// deliberately separate from the library's Simpson code so moment checks do
// not share an implementation with what they verify.
template <typename F>
double midpoint_integral(F&& f, double lo, double hi, int cells = 2'000'000) {
  double h = (hi - lo) / cells;
  double sum = 0.0;
  for (int i = 0; i < cells; ++i) sum += f(lo + (i + 0.5) * h);
  return sum * h;
}

// The raised-cosine window written out longhand for the oracle side.
double raw_bump(double x, double c, double h, double amp) {
  if (std::fabs(x - c) >= h) return 0.0;
  double ph = std::cos(M_PI * (x - c) / (2.0 * h));
  return amp * ph * ph;
}

}  // namespace

TEST_CASE("bump closed-form moments match independent quadrature") {
  struct Geo {
    double c, h, amp;
  };
  for (Geo g : {Geo{2.0, 0.25, 1.0}, Geo{-2.5, 0.3, -1.7}, Geo{0.75, 0.05, 3.2}}) {
    double lo = g.c - 2.0 * g.h, hi = g.c + 2.0 * g.h;
    double oracle_i = midpoint_integral([&](double x) { return raw_bump(x, g.c, g.h, g.amp); }, lo, hi);
    double oracle_x =
        midpoint_integral([&](double x) { return x * raw_bump(x, g.c, g.h, g.amp); }, lo, hi);
    double oracle_sq = midpoint_integral(
        [&](double x) {
          double v = raw_bump(x, g.c, g.h, g.amp);
          return v * v;
        },
        lo, hi);
    Bump b{g.c, g.h, g.amp};
    CHECK(b.integral() == doctest::Approx(oracle_i).epsilon(1e-9));
    CHECK(b.first_moment() == doctest::Approx(oracle_x).epsilon(1e-9));
    CHECK(b.square_integral() == doctest::Approx(oracle_sq).epsilon(1e-9));
    CHECK(b.integral() == doctest::Approx(g.amp * g.h).epsilon(1e-15));
    CHECK(b.first_moment() == doctest::Approx(g.amp * g.h * g.c).epsilon(1e-15));
    CHECK(b.square_integral() == doctest::Approx(0.75 * g.amp * g.amp * g.h).epsilon(1e-15));
  }
}

TEST_CASE("default wavelet solves the documented left amplitudes") {
  WaveletSpec w = default_wavelet();
  CHECK(w.A == 3.0);
  CHECK(w.left1.amplitude == doctest::Approx(-6.0).epsilon(1e-13));
  CHECK(w.left2.amplitude == doctest::Approx(5.0).epsilon(1e-13));

  // Oracle: both vanishing moments recomputed by brute quadrature over the
  // assembled function, not via the bump closed forms.
  auto psi = [&](double x) { return eval_psi(w, x); };
  CHECK(midpoint_integral(psi, -3.0, 3.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(midpoint_integral([&](double x) { return x * psi(x); }, -3.0, 3.0) ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(midpoint_integral([&](double x) { return psi(x) * psi(x); }, -3.0, 3.0) ==
        doctest::Approx(11.625).epsilon(1e-9));
  CHECK(midpoint_integral(psi, 1.0, 3.0) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(midpoint_integral([&](double x) { return x * psi(x); }, 1.0, 3.0) ==
        doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("eval_psi point values and hard zeros") {
  WaveletSpec w = default_wavelet();
  CHECK(eval_psi(w, 2.0) == 1.0);
  CHECK(eval_psi(w, -1.75) == -6.0);
  CHECK(eval_psi(w, -2.5) == 5.0);
  for (double x : {0.0, 0.5, 1.0, -1.0, 3.0, -3.0, 4.2, -7.0})
    CHECK(eval_psi(w, x) == 0.0);
  // Dead zone and outside-support are identically zero, not merely small.
  for (int i = 0; i <= 400; ++i) {
    CHECK(eval_psi(w, -1.0 + i / 200.0) == 0.0);
    CHECK(eval_psi(w, 3.0 + i / 100.0) == 0.0);
    CHECK(eval_psi(w, -3.0 - i / 100.0) == 0.0);
  }
}

TEST_CASE("psi_moments validates the default geometry") {
  MomentReport m = psi_moments(default_wavelet());
  CHECK(std::fabs(m.integral) <= 1e-8);
  CHECK(std::fabs(m.first_moment) <= 1e-8);
  CHECK(m.square_integral == doctest::Approx(11.625).epsilon(1e-6));
  CHECK(m.one_sided_integral == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(m.one_sided_first_moment == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.dead_zone_max_abs == 0.0);
  CHECK(m.outside_max_abs == 0.0);
  CHECK(m.ok);
}

TEST_CASE("detector wavelet satisfies the same assumptions") {
  WaveletSpec w = detector_default_wavelet();
  CHECK(w.A == 6.0);
  CHECK(w.left1.amplitude == doctest::Approx(-6.85 / 4.15).epsilon(1e-14));
  CHECK(w.left2.amplitude == doctest::Approx(2.7 / 4.15).epsilon(1e-14));
  MomentReport m = psi_moments(w);
  CHECK(m.ok);
  CHECK(m.one_sided_integral == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(m.one_sided_first_moment == doctest::Approx(0.405).epsilon(1e-6));
}

TEST_CASE("validation_report carries the assumption verdict") {
  std::string txt = validation_report(default_wavelet());
  CHECK(txt.find("schema = setarw-validate/1") != std::string::npos);
  CHECK(txt.find("assumption_ok = true") != std::string::npos);
  CHECK(txt.find("integral_psi_sq = ") != std::string::npos);
}

TEST_CASE("build_wavelet rejects bad geometry") {
  BumpGeometry right{2.0, 0.5, 1.0}, l1{-1.75, 0.5, 0.0}, l2{-2.5, 0.5, 0.0};
  CHECK_THROWS_AS(build_wavelet(1.0, right, l1, l2), error);
  CHECK_THROWS_AS(build_wavelet(0.5, right, l1, l2), error);
  CHECK_THROWS_AS(build_wavelet(3.0, BumpGeometry{2.9, 0.5, 1.0}, l1, l2), error);
  CHECK_THROWS_AS(build_wavelet(3.0, BumpGeometry{1.1, 0.5, 1.0}, l1, l2), error);
  CHECK_THROWS_AS(build_wavelet(3.0, right, BumpGeometry{2.0, 0.5, 0.0}, l2), error);
  CHECK_THROWS_AS(build_wavelet(3.0, right, l1, BumpGeometry{-2.9, 0.5, 0.0}), error);
  CHECK_THROWS_AS(build_wavelet(3.0, right, BumpGeometry{-2.0, 0.5, 0.0},
                                BumpGeometry{-2.0, 0.3, 0.0}),
                  error);  // shared center: singular
  CHECK_THROWS_AS(build_wavelet(3.0, BumpGeometry{2.0, 0.5, 1e-4}, l1, l2),
                  error);  // one-sided mass collapses
  CHECK_THROWS_AS(build_wavelet(3.0, BumpGeometry{2.0, -0.5, 1.0}, l1, l2), error);
}

TEST_CASE("eval_psi_jk matches the dilation identity at fixed points") {
  WaveletSpec w = default_wavelet();
  CHECK(eval_psi_jk(w, 0, 0, 2.0) == 1.0);
  CHECK(eval_psi_jk(w, 1, 0, 1.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(eval_psi_jk(w, 2, 3, 1.25) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(eval_psi_jk(w, 3, 5, 0.875) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  CHECK(eval_psi_jk(w, 4, -7, (2.0 - 7.0) / 16.0) == doctest::Approx(4.0).epsilon(1e-15));
  // support shrinks with j
  CHECK(eval_psi_jk(w, 5, 0, 0.5) == 0.0);
}

TEST_CASE("two-scale refinement consistency on dyadic triples") {
  WaveletSpec w = default_wavelet();
  // 2^{j-1} x' - k' = 2^j x - k  =>  psi_jk(j,k,x) = sqrt(2) psi_jk(j-1,k',x').
  struct Triple {
    int j;
    long long k, kp;
    double x;
  };
  for (Triple t : {Triple{1, 0, 0, 2.0}, Triple{3, 5, 2, 0.875}, Triple{4, -7, 3, -0.3125},
                   Triple{2, 3, -1, 1.25}, Triple{6, 11, 0, 0.171875}}) {
    double arg = std::ldexp(t.x, t.j) - static_cast<double>(t.k);
    double xp = std::ldexp(arg + static_cast<double>(t.kp), -(t.j - 1));
    double lhs = eval_psi_jk(w, t.j, t.k, t.x);
    double rhs = std::sqrt(2.0) * eval_psi_jk(w, t.j - 1, t.kp, xp);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("periodized kernel repeats exactly across window periods") {
  WaveletSpec w = default_wavelet();
  // Dyadic data keeps the fractional reduction bit-exact across one period.
  PeriodicWindow w01{0.0, 1.0, 0, 0};
  for (double x : {0.125, 0.375, 0.8125, 0.0625}) {
    double base = eval_psi_per(w, w01, x);
    CHECK(eval_psi_per(w, w01, x + 1.0) == base);
    CHECK(eval_psi_per(w, w01, x - 2.0) == base);
  }
  PeriodicWindow wide{-2.0, 6.0, 2, 3};
  for (double x : {-1.5, 0.25, 3.0}) {
    double base = eval_psi_per(w, wide, x);
    CHECK(eval_psi_per(w, wide, x + 8.0) == base);
    CHECK(eval_psi_per(w, wide, x - 8.0) == base);
  }
}

TEST_CASE("periodized term counts match the support arithmetic") {
  WaveletSpec w = default_wavelet();
  // Scale 0 on a unit window: the translated supports tile six unit cells.
  PeriodicWindow w0{0.0, 1.0, 0, 0};
  CHECK(psi_per_term_count(w, w0, 0.5) == 6);
  // 2^j beyond the support diameter leaves at most one contributing shift.
  PeriodicWindow w3{0.0, 1.0, 3, 4};
  CHECK(psi_per_term_count(w, w3, 0.5) == 1);
}

TEST_CASE("periodized kernel integrates to zero over one period") {
  WaveletSpec w = default_wavelet();
  PeriodicWindow win{-1.2, 2.3, 1, 1};
  double total = midpoint_integral([&](double x) { return eval_psi_per(w, win, x); }, win.a, win.b,
                                   400'000);
  CHECK(total == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("simpson_tabulated is exact on cubics for both parities") {
  auto tab = [](int pts) {
    std::vector<double> y(pts);
    for (int i = 0; i < pts; ++i) {
      double x = 2.0 * i / (pts - 1);
      y[i] = x * x * x;
    }
    return y;
  };
  CHECK(simpson_tabulated(tab(7), 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(simpson_tabulated(tab(8), 0.0, 2.0) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK_THROWS_AS(simpson_tabulated(std::vector<double>{1.0, 2.0, 3.0}, 0.0, 1.0), error);
}

TEST_CASE("affine inputs: aligned cells vanish, wrapped cells do not") {
  WaveletSpec w = default_wavelet();
  // j=3 fits the support inside the window for k=4: both moments kill an
  // affine integrand.
  PeriodicWindow aligned{0.0, 1.0, 3, 4};
  int pts = 4097;
  std::vector<double> f(pts);
  for (int i = 0; i < pts; ++i) f[i] = static_cast<double>(i) / (pts - 1);
  CHECK(wavelet_coefficient(w, aligned, f) == doctest::Approx(0.0).scale(1.0).epsilon(1e-7));

  // Wrapped cell (j=0): the periodization redistributes mass between periods
  // and the affine response survives.  Oracle value from the cell integrals:
  // sum_n n * int_n^{n+1} psi = -0.375 on this geometry.
  PeriodicWindow wrapped{0.0, 1.0, 0, 0};
  CHECK(wavelet_coefficient(w, wrapped, f) == doctest::Approx(0.375).epsilon(1e-5));

  // Constant series gives exactly the zero-mean identity in either case.
  std::vector<double> ones(pts, 1.0);
  CHECK(wavelet_coefficient(w, wrapped, ones) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("wavelet_coefficient enforces its sampling floor") {
  WaveletSpec w = default_wavelet();
  PeriodicWindow win{0.0, 1.0, 3, 4};
  std::vector<double> few(100, 1.0);
  CHECK_THROWS_AS(wavelet_coefficient(w, win, few), error);
  std::vector<double> enough(128, 1.0);
  CHECK_NOTHROW(wavelet_coefficient(w, win, enough));
}
