#include "core/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/common.hpp"

namespace setarw {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_half_interval(const Bump& b, double lo, double hi, const char* name) {
  if (b.half_width <= 0.0)
    fail(errc::invalid_argument, strfmt("wavelet: %s bump width must be positive", name));
  if (!(b.center - b.half_width > lo && b.center + b.half_width < hi))
    fail(errc::invalid_argument,
         strfmt("wavelet: %s bump support [%g, %g] not strictly inside (%g, %g)", name,
                b.center - b.half_width, b.center + b.half_width, lo, hi));
}

}  // namespace

double Bump::eval(double x) const {
  double t = x - center;
  if (!(std::fabs(t) < half_width)) return 0.0;
  double c = std::cos(kPi * t / (2.0 * half_width));
  return amplitude * c * c;
}

WaveletSpec build_wavelet(double A, BumpGeometry right, BumpGeometry left1, BumpGeometry left2) {
  if (!(A > 1.0)) fail(errc::invalid_argument, "wavelet: support half-width A must exceed 1");

  WaveletSpec spec;
  spec.A = A;
  spec.right = Bump{right.center, 0.5 * right.width, right.amplitude};
  spec.left1 = Bump{left1.center, 0.5 * left1.width, 0.0};
  spec.left2 = Bump{left2.center, 0.5 * left2.width, 0.0};

  check_half_interval(spec.right, 1.0, A, "right");
  check_half_interval(spec.left1, -A, -1.0, "first left");
  check_half_interval(spec.left2, -A, -1.0, "second left");

  // Zeroth and first moment of a unit cos^2 window are h and c*h, so the two
  // left amplitudes solve
  //   a1*h1 + a2*h2         = -Ir
  //   a1*h1*c1 + a2*h2*c2   = -Ir*cr.
  double Ir = spec.right.integral();
  double c1 = spec.left1.center, c2 = spec.left2.center;
  double h1 = spec.left1.half_width, h2 = spec.left2.half_width;
  double det_scale = std::max({std::fabs(c1), std::fabs(c2), 1.0});
  if (std::fabs(c2 - c1) <= 1e-12 * det_scale)
    fail(errc::invalid_argument, "wavelet: left bumps share a center, moment system is singular");
  spec.left1.amplitude = -Ir * (c2 - right.center) / (h1 * (c2 - c1));
  spec.left2.amplitude = -Ir * (right.center - c1) / (h2 * (c2 - c1));

  double one_sided = Ir;
  double one_sided_x = spec.right.first_moment();
  if (std::fabs(one_sided) <= 1e-3 || std::fabs(one_sided_x) <= 1e-3)
    fail(errc::invalid_argument,
         strfmt("wavelet: one-sided moments too small (int=%g, x-int=%g), need |.| > 1e-3",
                one_sided, one_sided_x));
  return spec;
}

WaveletSpec default_wavelet() {
  return build_wavelet(3.0, BumpGeometry{2.0, 0.5, 1.0}, BumpGeometry{-1.75, 0.5, 0.0},
                       BumpGeometry{-2.5, 0.5, 0.0});
}

WaveletSpec detector_default_wavelet() {
  // Near bumps hug the dead zone so the step response peaks over the cell
  // containing the jump; the far-left counterweight pushes the opposite-sign
  // response plateau outside the guarded cell range (see docs/calibration.md).
  return build_wavelet(6.0, BumpGeometry{1.35, 0.6, 1.0}, BumpGeometry{-1.35, 0.6, 0.0},
                       BumpGeometry{-5.5, 0.6, 0.0});
}

double eval_psi(const WaveletSpec& spec, double x) {
  double ax = std::fabs(x);
  if (ax <= 1.0 || ax >= spec.A) return 0.0;
  if (x > 0.0) return spec.right.eval(x);
  return spec.left1.eval(x) + spec.left2.eval(x);
}

double eval_psi_jk(const WaveletSpec& spec, int j, long long k, double x) {
  double scaled = std::ldexp(x, j) - static_cast<double>(k);
  return std::sqrt(std::ldexp(1.0, j)) * eval_psi(spec, scaled);
}

namespace {

// Contributing integer shifts for the periodized sum at fractional window
// coordinate uf: psi_jk(uf + n) != 0 requires 2^j (uf + n) - k in (-A, A).
struct ShiftRange {
  long long lo, hi;
};

ShiftRange shift_range(const WaveletSpec& spec, int j, long long k, double uf) {
  double scale = std::ldexp(1.0, -j);
  double lo = (static_cast<double>(k) - spec.A) * scale - uf;
  double hi = (static_cast<double>(k) + spec.A) * scale - uf;
  return ShiftRange{static_cast<long long>(std::ceil(lo)), static_cast<long long>(std::floor(hi))};
}

double window_fraction(const PeriodicWindow& w, double x) {
  double u = (x - w.a) / (w.b - w.a);
  double uf = u - std::floor(u);
  if (uf >= 1.0) uf -= 1.0;  // floor rounding guard
  return uf;
}

}  // namespace

double eval_psi_per(const WaveletSpec& spec, const PeriodicWindow& w, double x) {
  if (!(w.b > w.a)) fail(errc::invalid_argument, "psi_per: window requires a < b");
  if (w.j < 0) fail(errc::invalid_argument, "psi_per: scale j must be non-negative");
  double uf = window_fraction(w, x);
  ShiftRange r = shift_range(spec, w.j, w.k, uf);
  double sum = 0.0;
  for (long long n = r.lo; n <= r.hi; ++n)
    sum += eval_psi_jk(spec, w.j, w.k, uf + static_cast<double>(n));
  return sum / std::sqrt(w.b - w.a);
}

int psi_per_term_count(const WaveletSpec& spec, const PeriodicWindow& w, double x) {
  ShiftRange r = shift_range(spec, w.j, w.k, window_fraction(w, x));
  return r.hi < r.lo ? 0 : static_cast<int>(r.hi - r.lo + 1);
}

namespace {

template <typename F>
double simpson(F&& f, double lo, double hi, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i) sum += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// Composite Simpson with nodes pinned to the piece boundaries.  The windows
// are only C^1 at their support edges; aligning nodes there restores the
// full-order convergence on each smooth piece.
template <typename F>
double simpson_piecewise(F&& f, const std::vector<double>& breaks, int total_intervals) {
  double span = breaks.back() - breaks.front();
  double sum = 0.0;
  for (size_t i = 0; i + 1 < breaks.size(); ++i) {
    double len = breaks[i + 1] - breaks[i];
    if (len <= 0.0) continue;
    int n = std::max(16, static_cast<int>(total_intervals * len / span));
    sum += simpson(f, breaks[i], breaks[i + 1], n);
  }
  return sum;
}

std::vector<double> piece_breaks(const WaveletSpec& spec, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (const Bump* b : {&spec.right, &spec.left1, &spec.left2}) {
    for (double e : {b->center - b->half_width, b->center + b->half_width})
      if (e > lo && e < hi) pts.push_back(e);
  }
  for (double e : {-1.0, 1.0})
    if (e > lo && e < hi) pts.push_back(e);
  std::sort(pts.begin(), pts.end());
  return pts;
}

}  // namespace

double simpson_tabulated(const std::vector<double>& y, double lo, double hi) {
  size_t n = y.size();
  if (n < 5) fail(errc::invalid_argument, "simpson: need at least 5 samples");
  size_t intervals = n - 1;
  double h = (hi - lo) / static_cast<double>(intervals);
  size_t simpson_end = intervals;  // index where the plain composite rule stops
  double tail = 0.0;
  if (intervals % 2 != 0) {
    // 3/8 rule over the last three intervals keeps the whole rule third order.
    simpson_end = intervals - 3;
    tail = 3.0 * h / 8.0 *
           (y[simpson_end] + 3.0 * y[simpson_end + 1] + 3.0 * y[simpson_end + 2] + y[intervals]);
  }
  double sum = y[0] + y[simpson_end];
  for (size_t i = 1; i < simpson_end; ++i) sum += y[i] * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0 + tail;
}

MomentReport psi_moments(const WaveletSpec& spec, int quadrature_nodes) {
  if (quadrature_nodes < 16) fail(errc::invalid_argument, "psi_moments: too few quadrature nodes");
  MomentReport r;
  auto psi = [&](double x) { return eval_psi(spec, x); };
  std::vector<double> full = piece_breaks(spec, -spec.A, spec.A);
  std::vector<double> right = piece_breaks(spec, 1.0, spec.A);
  r.integral = simpson_piecewise(psi, full, quadrature_nodes);
  r.first_moment =
      simpson_piecewise([&](double x) { return x * eval_psi(spec, x); }, full, quadrature_nodes);
  r.square_integral = simpson_piecewise(
      [&](double x) { double v = eval_psi(spec, x); return v * v; }, full, quadrature_nodes);
  r.one_sided_integral = simpson_piecewise(psi, right, quadrature_nodes);
  r.one_sided_first_moment =
      simpson_piecewise([&](double x) { return x * eval_psi(spec, x); }, right, quadrature_nodes);
  for (int i = 0; i <= 1000; ++i) {
    double x = -1.0 + 2.0 * i / 1000.0;
    r.dead_zone_max_abs = std::max(r.dead_zone_max_abs, std::fabs(eval_psi(spec, x)));
    r.outside_max_abs = std::max(r.outside_max_abs, std::fabs(eval_psi(spec, spec.A + 0.01 * i)));
    r.outside_max_abs = std::max(r.outside_max_abs, std::fabs(eval_psi(spec, -spec.A - 0.01 * i)));
  }
  r.ok = std::fabs(r.integral) <= 1e-8 && std::fabs(r.first_moment) <= 1e-8 &&
         r.square_integral > 0.0 && std::fabs(r.one_sided_integral) > 1e-3 &&
         std::fabs(r.one_sided_first_moment) > 1e-3 && r.dead_zone_max_abs == 0.0 &&
         r.outside_max_abs == 0.0;
  return r;
}

std::string validation_report(const WaveletSpec& spec, int quadrature_nodes) {
  MomentReport m = psi_moments(spec, quadrature_nodes);
  std::ostringstream out;
  out << "schema = setarw-validate/1\n";
  out << "support_half_width = " << fmt_g17(spec.A) << "\n";
  out << "quadrature_nodes = " << quadrature_nodes << "\n";
  out << "integral_psi = " << fmt_g17(m.integral) << "\n";
  out << "integral_x_psi = " << fmt_g17(m.first_moment) << "\n";
  out << "integral_psi_sq = " << fmt_g17(m.square_integral) << "\n";
  out << "one_sided_integral = " << fmt_g17(m.one_sided_integral) << "\n";
  out << "one_sided_x_integral = " << fmt_g17(m.one_sided_first_moment) << "\n";
  out << "dead_zone_max_abs = " << fmt_g17(m.dead_zone_max_abs) << "\n";
  out << "outside_support_max_abs = " << fmt_g17(m.outside_max_abs) << "\n";
  out << "left_amplitudes = " << fmt_g17(spec.left1.amplitude) << " "
      << fmt_g17(spec.left2.amplitude) << "\n";
  out << "assumption_ok = " << (m.ok ? "true" : "false") << "\n";
  return out.str();
}

double wavelet_coefficient(const WaveletSpec& spec, const PeriodicWindow& w,
                           const std::vector<double>& f_samples) {
  size_t min_pts = static_cast<size_t>(1) << (w.j + 4);
  if (f_samples.size() < std::max<size_t>(min_pts, 5))
    fail(errc::invalid_argument,
         strfmt("wavelet_coefficient: need at least %zu samples at scale j=%d",
                std::max<size_t>(min_pts, 5), w.j));
  std::vector<double> y(f_samples.size());
  double h = (w.b - w.a) / static_cast<double>(f_samples.size() - 1);
  for (size_t i = 0; i < y.size(); ++i) {
    double x = w.a + h * static_cast<double>(i);
    y[i] = eval_psi_per(spec, w, x) * f_samples[i];
  }
  return simpson_tabulated(y, w.a, w.b);
}

}  // namespace setarw
