#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace setarw {

enum class NoiseKind { uniform, truncated_gaussian };

// Bounded mean-zero noise: uniform on [-M, M], or a gaussian with standard
// deviation `scale` resampled until it lands in [-M, M].
struct NoiseSpec {
  NoiseKind kind = NoiseKind::uniform;
  double scale = 1.0;
  double bound = 1.0;
};

struct Regime {
  double intercept = 0.0;
  std::vector<double> coeffs;
  NoiseSpec noise;
};

struct SetarModel {
  std::vector<Regime> regimes;     // r+1 entries, one per interval
  std::vector<double> thresholds;  // r strictly increasing values
  int delay = 1;
  int delay_bound = 1;

  int order() const;          // p: max regime order (coeffs are padded to it)
  int regime_count() const { return static_cast<int>(regimes.size()); }
};

// Pads every regime's coefficients to the common order and enforces the model
// invariants; call once after assembling a model by hand or from a file.
void finalize_model(SetarModel& model);

// 1-based regime of a delayed value: the unique l with v in (lambda_{l-1},
// lambda_l]; boundary values belong to the regime on their left.
int regime_index(const SetarModel& model, double v);

// Noiseless conditional mean given the lag window and the regime selector.
double skeleton_H(const SetarModel& model, const std::vector<double>& lags, double v_d);

struct StabilityReport {
  std::vector<int> flagged_regimes;  // 1-based, sum |b_lm| >= 1
  bool ok = true;
};

StabilityReport check_stability_heuristic(const SetarModel& model);

struct SeriesSample {
  std::vector<double> values;
  long long seed = 0;
  int burn_in = 0;
  std::optional<SetarModel> provenance;
};

SeriesSample simulate(const SetarModel& model, long long n, long long seed, int burn_in);

// CSV contract: schema comment, `t,x` header, 17-significant-digit values so
// the decimal text round-trips bit-exactly.
std::string series_to_csv(const SeriesSample& series);
SeriesSample series_from_csv(const std::string& text);

// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

}  // namespace setarw
