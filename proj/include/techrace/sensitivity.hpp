#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "techrace/model.hpp"
#include "techrace/scenario.hpp"

namespace techrace {

// The six calibrated parameters of the robustness grid.
enum class SweepParameter { p_max, pi0, eta, beta, kappa, tau };

std::string_view to_string(SweepParameter parameter);
SweepParameter parse_sweep_parameter(std::string_view text);
const std::vector<SweepParameter>& all_sweep_parameters();

// Robustness-grid values, e.g. eta -> {1, 2, 3, 4, 5}.
std::vector<double> default_grid(SweepParameter parameter);
// Documented plausibility range (the grid's extremes).
std::pair<double, double> plausible_range(SweepParameter parameter);

// Calibrated baseline vector used by the robustness grid: baseline DET,
// eta = 3, other values from the catalog baseline. g_p is set per regime.
ModelParams sweep_base(const PresetCatalog& catalog);

struct SweepGrid {
  SweepParameter parameter = SweepParameter::eta;
  std::vector<double> values;
  std::vector<PetRegime> regimes;
  ModelParams base;
};

SweepGrid default_sweep(SweepParameter parameter, const PresetCatalog& catalog);

struct SweepSurface {
  SweepParameter parameter = SweepParameter::eta;
  std::vector<double> values;
  std::vector<PetRegime> regimes;
  std::vector<double> r;  // row-major: r[value_index * regimes.size() + regime_index]
  std::vector<std::string> warnings;

  double at(std::size_t value_index, std::size_t regime_index) const {
    return r[value_index * regimes.size() + regime_index];
  }
};

// One-at-a-time sweep. Values outside the plausibility range produce a
// warning, not an error. Grid points are evaluated concurrently.
SweepSurface oat_sweep(const SweepGrid& grid, const PresetCatalog& catalog);

// [R(hi) - R(lo)] / R(base) * base_value / (hi - lo) for any scalar
// parameter name. Requires lo < hi and lo <= base_value <= hi.
double arc_elasticity(std::string_view parameter, double lo, double hi,
                      const ModelParams& base);

// (R with RAI + shift - R) / R.
double rai_shift_sensitivity(const ModelParams& params, double shift);
double rai_shift_sensitivity(const PresetCatalog& catalog,
                             const ScenarioSpec& spec, double shift);

struct DetectionCurve {
  double theta = 0.0;
  double inflection_rai = 0.0;
  double pr_at_inflection = 0.0;
  std::vector<double> rai;
  std::vector<double> pr;
};

struct CurveRange {
  double rai_min = -100.0;
  double rai_max = 100.0;
  std::size_t points = 401;
};

std::vector<DetectionCurve> detection_theta_curves(
    std::span<const double> thetas, double kappa = 0.4, double pi0 = 0.10,
    CurveRange range = {});

// Ensemble over which the uncertainty band is the pointwise min/max. Each
// non-empty axis multiplies the ensemble size.
struct BandSpec {
  double resolution = 10.0;                 // samples per year
  std::vector<double> step_time_offsets;    // years added to every DET step
  std::vector<double> step_scales;          // multipliers on every DET delta
  std::vector<std::pair<std::string, std::vector<double>>> parameters;

  // p_max grid, step timing -1/0/+1 year, step magnitude 0.8/1/1.2.
  static BandSpec defaults();
};

struct Envelope {
  std::vector<double> lower;
  std::vector<double> nominal;
  std::vector<double> upper;
};

struct UncertaintyBand {
  std::vector<double> t;
  Envelope p;
  Envelope d;
  Envelope rai;
  Envelope r;
  std::size_t members = 0;   // ensemble members evaluated, nominal included
  std::size_t skipped = 0;   // members with an invalid DET schedule
};

UncertaintyBand uncertainty_band(const ModelParams& nominal,
                                 const BandSpec& band);

}  // namespace techrace
