#include "core/setar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "core/common.hpp"

namespace setarw {

int SetarModel::order() const {
  size_t p = 0;
  for (const Regime& r : regimes) p = std::max(p, r.coeffs.size());
  return static_cast<int>(p);
}

void finalize_model(SetarModel& model) {
  if (model.regimes.empty()) fail(errc::invalid_argument, "model: needs at least one regime");
  if (model.regimes.size() != model.thresholds.size() + 1)
    fail(errc::invalid_argument,
         strfmt("model: %zu regimes require %zu thresholds, got %zu", model.regimes.size(),
                model.regimes.size() - 1, model.thresholds.size()));
  for (size_t i = 1; i < model.thresholds.size(); ++i)
    if (!(model.thresholds[i - 1] < model.thresholds[i]))
      fail(errc::invalid_argument, "model: thresholds must be strictly increasing");
  for (double t : model.thresholds)
    if (!std::isfinite(t)) fail(errc::invalid_argument, "model: thresholds must be finite");
  if (model.delay < 1) fail(errc::invalid_argument, "model: delay must be >= 1");
  if (model.delay_bound < model.delay)
    fail(errc::invalid_argument,
         strfmt("model: delay bound %d below delay %d", model.delay_bound, model.delay));
  size_t p = static_cast<size_t>(model.order());
  for (size_t l = 0; l < model.regimes.size(); ++l) {
    Regime& r = model.regimes[l];
    r.coeffs.resize(p, 0.0);  // padded b_lm = 0 beyond the regime's own order
    for (double c : r.coeffs)
      if (!std::isfinite(c))
        fail(errc::invalid_argument, strfmt("model: regime %zu has a non-finite coefficient", l + 1));
    if (!std::isfinite(r.intercept))
      fail(errc::invalid_argument, strfmt("model: regime %zu has a non-finite intercept", l + 1));
    if (!(r.noise.bound > 0.0) || !std::isfinite(r.noise.bound))
      fail(errc::invalid_argument, strfmt("model: regime %zu noise bound must be positive", l + 1));
    if (r.noise.kind == NoiseKind::truncated_gaussian &&
        (!(r.noise.scale > 0.0) || !std::isfinite(r.noise.scale)))
      fail(errc::invalid_argument, strfmt("model: regime %zu noise scale must be positive", l + 1));
  }
}

int regime_index(const SetarModel& model, double v) {
  // (lambda_{l-1}, lambda_l] intervals: count thresholds strictly below v.
  auto it = std::lower_bound(model.thresholds.begin(), model.thresholds.end(), v);
  return static_cast<int>(it - model.thresholds.begin()) + 1;
}

double skeleton_H(const SetarModel& model, const std::vector<double>& lags, double v_d) {
  const Regime& r = model.regimes[regime_index(model, v_d) - 1];
  if (lags.size() < r.coeffs.size())
    fail(errc::invalid_argument, strfmt("skeleton: %zu lags for order %zu", lags.size(),
                                        r.coeffs.size()));
  double mean = r.intercept;
  for (size_t m = 0; m < r.coeffs.size(); ++m) mean += r.coeffs[m] * lags[m];
  return mean;
}

StabilityReport check_stability_heuristic(const SetarModel& model) {
  StabilityReport rep;
  for (size_t l = 0; l < model.regimes.size(); ++l) {
    double s = 0.0;
    for (double c : model.regimes[l].coeffs) s += std::fabs(c);
    if (s >= 1.0) rep.flagged_regimes.push_back(static_cast<int>(l) + 1);
  }
  rep.ok = rep.flagged_regimes.empty();
  return rep;
}

namespace {

// Noise draws are hand-rolled on top of mt19937_64 so identical seeds give
// identical bytes on every platform; the std distributions do not promise
// a fixed algorithm.
class NoiseStream {
 public:
  NoiseStream(long long seed, int regime, const NoiseSpec& spec) : spec_(spec) {
    std::seed_seq seq{static_cast<unsigned>(seed), static_cast<unsigned>(seed >> 32),
                      static_cast<unsigned>(regime), 0x5e7a2u};
    rng_.seed(seq);
  }

  double next() {
    if (spec_.kind == NoiseKind::uniform) return spec_.bound * (2.0 * unit() - 1.0);
    for (;;) {
      double u1 = unit_open();
      double u2 = unit();
      double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
      double eps = spec_.scale * z;
      if (std::fabs(eps) <= spec_.bound) return eps;
    }
  }

 private:
  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }       // [0,1)
  double unit_open() { return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53; }  // (0,1]

  std::mt19937_64 rng_;
  NoiseSpec spec_;
};

}  // namespace

SeriesSample simulate(const SetarModel& model, long long n, long long seed, int burn_in) {
  SetarModel checked = model;
  finalize_model(checked);
  int p = checked.order();
  int D = checked.delay_bound;
  int d = checked.delay;
  if (n < D + 2)
    fail(errc::invalid_argument, strfmt("simulate: need n >= D+2 = %d, got %lld", D + 2, n));
  if (burn_in < std::max(p, d))
    fail(errc::invalid_argument,
         strfmt("simulate: burn_in must be >= max(p, d) = %d", std::max(p, d)));

  std::vector<NoiseStream> streams;
  streams.reserve(checked.regimes.size());
  for (size_t l = 0; l < checked.regimes.size(); ++l)
    streams.emplace_back(seed, static_cast<int>(l) + 1, checked.regimes[l].noise);

  size_t total = static_cast<size_t>(burn_in) + static_cast<size_t>(n);
  size_t head = std::min(static_cast<size_t>(std::max(p, D)), total);
  std::vector<double> v(total);
  for (size_t t = 0; t < head; ++t) v[t] = streams[0].next();
  for (size_t t = head; t < total; ++t) {
    double sel = v[t - static_cast<size_t>(d)];
    int l = regime_index(checked, sel);
    // Partition sanity: the chosen interval must actually contain sel.
    double lo = l >= 2 ? checked.thresholds[l - 2] : -1.0 / 0.0;
    double hi = static_cast<size_t>(l) <= checked.thresholds.size() ? checked.thresholds[l - 1]
                                                                    : 1.0 / 0.0;
    if (!(sel > lo && sel <= hi))
      fail(errc::internal_error, strfmt("simulate: regime partition violated at step %zu", t));
    const Regime& reg = checked.regimes[l - 1];
    double mean = reg.intercept;
    for (int m = 1; m <= p; ++m) mean += reg.coeffs[m - 1] * v[t - static_cast<size_t>(m)];
    double eps = streams[l - 1].next();
    if (std::fabs(eps) > reg.noise.bound)
      fail(errc::internal_error, strfmt("simulate: noise bound violated at step %zu", t));
    v[t] = mean + eps;
    if (!std::isfinite(v[t]))
      fail(errc::simulation_error,
           strfmt("simulate: non-finite value at step %zu (explosive model?)", t));
  }

  SeriesSample out;
  out.values.assign(v.begin() + static_cast<long>(burn_in), v.end());
  out.seed = seed;
  out.burn_in = burn_in;
  out.provenance = checked;
  return out;
}

std::string series_to_csv(const SeriesSample& series) {
  std::ostringstream out;
  out << "# schema: setarw-series/1\n";
  out << "t,x\n";
  for (size_t t = 0; t < series.values.size(); ++t)
    out << t << ',' << fmt_g17(series.values[t]) << '\n';
  return out.str();
}

SeriesSample series_from_csv(const std::string& text) {
  SeriesSample out;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "t,x")
        fail(errc::parse_error, strfmt("series csv line %zu: expected header 't,x'", line_no));
      header_seen = true;
      continue;
    }
    size_t comma = line.find(',');
    if (comma == std::string::npos)
      fail(errc::parse_error, strfmt("series csv line %zu: missing comma", line_no));
    errno = 0;
    char* endp = nullptr;
    const char* tfield = line.c_str();
    long long t = std::strtoll(tfield, &endp, 10);
    if (endp != tfield + comma || t < 0)
      fail(errc::parse_error, strfmt("series csv line %zu: bad index field", line_no));
    const char* xfield = line.c_str() + comma + 1;
    double x = std::strtod(xfield, &endp);
    if (endp == xfield || *endp != '\0' || !std::isfinite(x))
      fail(errc::parse_error, strfmt("series csv line %zu: bad value field", line_no));
    if (static_cast<size_t>(t) != out.values.size())
      fail(errc::parse_error,
           strfmt("series csv line %zu: index %lld out of order", line_no, t));
    out.values.push_back(x);
  }
  if (!header_seen) fail(errc::parse_error, "series csv: missing 't,x' header");
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) fail(errc::invalid_argument, "quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) fail(errc::invalid_argument, "quantile: q outside [0, 1]");
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  size_t lo = static_cast<size_t>(pos);
  if (lo + 1 >= values.size()) return values.back();
  double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

}  // namespace setarw
