#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/wavelet.hpp"

namespace setarw {

enum class EmptyPolicy { drop_and_renormalize, nearest_fallback };

struct EstimatorConfig {
  double a = 0.0, b = 1.0;  // detection window
  int D = 1;                // delay bound
  int p = 1;                // max assumed order, p <= D
  int j_star = 2;           // conditioning-grid scale
  int j_n = 1;              // detection scale (set from choose_scale)
  std::optional<double> delta_override;
  std::optional<long long> N_override;
  EmptyPolicy empty_policy = EmptyPolicy::drop_and_renormalize;
  double populated_floor = 0.5;
  bool full_grid = false;  // enumerate every conditioning base (oracle runs)
};

void validate_estimator_config(const EstimatorConfig& cfg);

// Window resolution plus the overridable knobs from an [estimator] section.
// The model, when available, supplies fallback order and delay bound.
EstimatorConfig estimator_config_from(const ConfigDoc& doc, const std::vector<double>& values,
                                      const SetarModel* model);

struct GridParams {
  double delta = 0.0;
  long long N = 0;
  std::vector<double> s;  // s_i = a + i(b-a)/N, i = 1..N
};

GridParams grid_params(long long n, const EstimatorConfig& cfg);

struct LagVector {
  std::vector<double> coords;  // D entries
  long long l = 0;             // origin index (response is x_l)
  int i = 0;                   // candidate lag
};

LagVector build_lag_vector(const std::vector<double>& x, long long l, int i,
                           const EstimatorConfig& cfg);

// Sorted-projection index on the first lag coordinate x_{l-1}; the first
// coordinate is shared by every candidate lag, so one index serves all m.
struct ProjectionIndex {
  std::vector<std::pair<double, long long>> by_first;  // (x_{l-1}, l) sorted
};

ProjectionIndex build_projection_index(const std::vector<double>& x, const EstimatorConfig& cfg);

// Indices l in [D, n-1] with ||X^m_l - T|| < delta and X^m_l <= T componentwise.
std::vector<long long> neighborhood(const std::vector<double>& x, const ProjectionIndex& index,
                                    int m, const std::vector<double>& T, double delta,
                                    const EstimatorConfig& cfg);

// Direct O(n D) scan kept as the correctness oracle for the indexed search.
std::vector<long long> neighborhood_brute(const std::vector<double>& x, int m,
                                          const std::vector<double>& T, double delta,
                                          const EstimatorConfig& cfg);

struct ConditioningBase {
  std::vector<double> coords;      // D-1 grid values
  std::vector<long long> grid_idx; // matching k indices on R_{j*}
  long long id = 0;
};

// Admissible bases for candidate lag m: coordinates landing on padded lag
// positions stay within delta of a (grid index ~0), the rest range over the
// full dyadic grid.  full_grid lifts the pruning for oracle comparisons.
std::vector<ConditioningBase> enumerate_bases(int m, double delta, const EstimatorConfig& cfg);

// T^{m,s}: base coordinates with s spliced in at position m (1-based).
std::vector<double> conditioning_point(const std::vector<double>& base, int m, double s);

// Replaces the neighborhood's empirical response mean; used by oracle tests
// to substitute the model skeleton, evaluated at the conditioning point T,
// for the noisy average.
using ResponseMean = std::function<double(
    const std::vector<double>& x, const std::vector<long long>& members,
    const std::vector<double>& T)>;

struct CellResult {
  double W = 0.0;
  double populated_fraction = 0.0;
  bool absent = true;
};

CellResult empirical_wavelet(const std::vector<double>& x, const ProjectionIndex& index, int m,
                             int j, long long k, const std::vector<double>& base,
                             const EstimatorConfig& cfg, const GridParams& grid,
                             const WaveletSpec& psi, const ResponseMean& mean_hook = nullptr);

struct SurfaceEntry {
  long long k = 0;
  long long base_id = 0;
  double W = 0.0;
  double populated_fraction = 0.0;
  bool low_confidence = false;
  bool absent = true;
};

struct Surface {
  int m = 0;
  int j = 0;
  std::vector<ConditioningBase> bases;
  std::vector<SurfaceEntry> entries;  // all k in I_j x bases, absent included
};

Surface build_surface(const std::vector<double>& x, int m, const EstimatorConfig& cfg,
                      const GridParams& grid, const WaveletSpec& psi,
                      const ResponseMean& mean_hook = nullptr);

// CSV export: `m,j,k,location,base_id,W,populated_fraction` rows (absent cells
// omitted) plus a sidecar mapping (m, base_id) to base coordinates.
std::string surfaces_to_csv(const std::vector<Surface>& surfaces, const EstimatorConfig& cfg);
std::string surfaces_bases_csv(const std::vector<Surface>& surfaces);

}  // namespace setarw
