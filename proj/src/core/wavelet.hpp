#pragma once

// Compactly supported detection wavelet: cosine-squared window bumps on
// [-A,-1] and [1,A], zero on [-1,1], with both vanishing moments enforced
// exactly by solving the two left amplitudes.

#include <string>
#include <vector>

namespace setarw {

struct Bump {
  double center = 0.0;
  double half_width = 0.0;
  double amplitude = 0.0;

  double eval(double x) const;      // exact 0 outside (center-half_width, center+half_width)
  double integral() const { return amplitude * half_width; }
  double first_moment() const { return amplitude * half_width * center; }
  double square_integral() const { return 0.75 * amplitude * amplitude * half_width; }
};

struct WaveletSpec {
  double A = 0.0;    // support half-width, psi == 0 outside [-A, A]
  Bump right;        // support inside (1, A)
  Bump left1, left2; // supports inside (-A, -1); amplitudes solved, not free
};

struct BumpGeometry {
  double center = 0.0;
  double width = 0.0;      // full support width
  double amplitude = 1.0;  // ignored for left bumps
};

// Solves the two left amplitudes from int psi = 0 and int x psi = 0 (closed
// form; the cos^2 window has integral a*h and first moment a*h*c exactly).
// Errors: A <= 1, bump support not strictly inside its half-interval,
// singular moment system (identical left centers), vanishing one-sided mass.
WaveletSpec build_wavelet(double A, BumpGeometry right, BumpGeometry left1, BumpGeometry left2);

// Module default geometry: A = 3, right bump at 2.0, left bumps at -1.75 and -2.5.
WaveletSpec default_wavelet();

// Detector default: same construction, geometry calibrated for threshold
// localization (bumps hugging the dead zone, far-left counterweight).
WaveletSpec detector_default_wavelet();

double eval_psi(const WaveletSpec& spec, double x);                      // exact 0 for |x|<=1, |x|>=A
double eval_psi_jk(const WaveletSpec& spec, int j, long long k, double x);  // 2^{j/2} psi(2^j x - k)

struct PeriodicWindow {
  double a = 0.0;
  double b = 1.0;
  int j = 0;
  long long k = 0;
};

// Periodization over [a,b]: sum_n (b-a)^{-1/2} psi_jk((x-a)/(b-a) + n).
// The contributing n-range is computed from the support bounds, so the value
// depends only on the fractional window coordinate (periodic by construction).
double eval_psi_per(const WaveletSpec& spec, const PeriodicWindow& w, double x);

// Contributing term count for a window coordinate; exposed for tests.
int psi_per_term_count(const WaveletSpec& spec, const PeriodicWindow& w, double x);

struct MomentReport {
  double integral = 0.0;          // int_{-A}^{A} psi
  double first_moment = 0.0;      // int x psi
  double square_integral = 0.0;   // int psi^2
  double one_sided_integral = 0.0;     // int_1^A psi
  double one_sided_first_moment = 0.0; // int_1^A x psi
  double dead_zone_max_abs = 0.0;      // max |psi| sampled on [-1,1]
  double outside_max_abs = 0.0;        // max |psi| sampled beyond [-A,A]
  bool ok = false;
};

// Composite-Simpson verification of the construction (quadrature_nodes
// intervals across [-A,A], default 10^4).
MomentReport psi_moments(const WaveletSpec& spec, int quadrature_nodes = 10000);

// Key-value text rendering of psi_moments for the validate command.
std::string validation_report(const WaveletSpec& spec, int quadrature_nodes = 10000);

// Test utility: quadrature approximation of int_a^b psi_per * f for f
// tabulated on a uniform inclusive grid over [a,b]. Requires at least
// 2^{j+4} samples (and >= 5).
double wavelet_coefficient(const WaveletSpec& spec, const PeriodicWindow& w,
                           const std::vector<double>& f_samples);

// Composite Simpson over tabulated uniform samples (3/8 tail when the
// interval count is odd). Shared by wavelet_coefficient and tests.
double simpson_tabulated(const std::vector<double>& y, double lo, double hi);

}  // namespace setarw
