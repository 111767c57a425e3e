#include "techrace/sensitivity.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

#include "techrace/error.hpp"
#include "techrace/parallel.hpp"

namespace techrace {
namespace {

constexpr std::array<std::string_view, 6> kSweepNames = {
    "p_max", "pi0", "eta", "beta", "kappa", "tau"};

}  // namespace

std::string_view to_string(SweepParameter parameter) {
  return kSweepNames[static_cast<std::size_t>(parameter)];
}

SweepParameter parse_sweep_parameter(std::string_view text) {
  for (std::size_t i = 0; i < kSweepNames.size(); ++i) {
    if (kSweepNames[i] == text) return static_cast<SweepParameter>(i);
  }
  throw LookupError("sweep parameter", std::string(text),
                    {kSweepNames.begin(), kSweepNames.end()});
}

const std::vector<SweepParameter>& all_sweep_parameters() {
  static const std::vector<SweepParameter> all = {
      SweepParameter::p_max, SweepParameter::pi0,   SweepParameter::eta,
      SweepParameter::beta,  SweepParameter::kappa, SweepParameter::tau};
  return all;
}

std::vector<double> default_grid(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::p_max: return {100, 110, 120, 130, 140};
    case SweepParameter::pi0: return {0.05, 0.10, 0.15, 0.20};
    case SweepParameter::eta: return {1, 2, 3, 4, 5};
    case SweepParameter::beta: return {0.05, 0.08, 0.10, 0.12, 0.15};
    case SweepParameter::kappa: return {0.25, 0.33, 0.40, 0.50, 0.60};
    case SweepParameter::tau: return {20, 30, 40, 50, 60};
  }
  return {};
}

std::pair<double, double> plausible_range(SweepParameter parameter) {
  const auto grid = default_grid(parameter);
  return {grid.front(), grid.back()};
}

ModelParams sweep_base(const PresetCatalog& catalog) {
  return catalog.build(
      catalog.spec(PetRegime::limited, DetPackage::baseline, true));
}

SweepGrid default_sweep(SweepParameter parameter, const PresetCatalog& catalog) {
  return {parameter, default_grid(parameter), all_regimes(),
          sweep_base(catalog)};
}

SweepSurface oat_sweep(const SweepGrid& grid, const PresetCatalog& catalog) {
  SweepSurface surface;
  surface.parameter = grid.parameter;
  surface.values = grid.values;
  surface.regimes = grid.regimes;

  const auto [lo, hi] = plausible_range(grid.parameter);
  for (double v : grid.values) {
    if (v < lo || v > hi) {
      surface.warnings.push_back(
          fmt::format("{} = {:g} lies outside the plausibility range [{:g}, {:g}]",
                      to_string(grid.parameter), v, lo, hi));
    }
  }

  const std::size_t n_regimes = grid.regimes.size();
  surface.r.assign(grid.values.size() * n_regimes, 0.0);
  parallel_for(surface.r.size(), [&](std::size_t k) {
    ModelParams p = grid.base;
    p.g_p = catalog.regime(grid.regimes[k % n_regimes]).g_p;
    set_param(p, to_string(grid.parameter), grid.values[k / n_regimes]);
    surface.r[k] = cumulative_risk(p);
  });
  return surface;
}

double arc_elasticity(std::string_view parameter, double lo, double hi,
                      const ModelParams& base) {
  if (!(lo < hi)) throw PreconditionError("arc_elasticity requires lo < hi");
  const double base_value = get_param(base, parameter);
  if (base_value < lo || base_value > hi) {
    throw PreconditionError(fmt::format(
        "base value {:g} of {} lies outside [{:g}, {:g}]", base_value,
        parameter, lo, hi));
  }
  const double r_base = cumulative_risk(base);
  if (r_base == 0.0) {
    throw UndefinedElasticity("elasticity undefined: R(base) = 0");
  }
  ModelParams low = base;
  ModelParams high = base;
  set_param(low, parameter, lo);
  set_param(high, parameter, hi);
  return (cumulative_risk(high) - cumulative_risk(low)) / r_base *
         base_value / (hi - lo);
}

double rai_shift_sensitivity(const ModelParams& params, double shift) {
  const double r = cumulative_risk(params);
  if (r == 0.0) {
    throw UndefinedElasticity("RAI-shift sensitivity undefined: R = 0");
  }
  return (cumulative_risk_shifted(params, shift) - r) / r;
}

double rai_shift_sensitivity(const PresetCatalog& catalog,
                             const ScenarioSpec& spec, double shift) {
  return rai_shift_sensitivity(catalog.build(spec), shift);
}

std::vector<DetectionCurve> detection_theta_curves(
    std::span<const double> thetas, double kappa, double pi0,
    CurveRange range) {
  if (!(kappa > 0.0)) throw PreconditionError("kappa must be > 0");
  if (!(pi0 >= 0.0 && pi0 < 1.0)) throw PreconditionError("pi0 must lie in [0, 1)");
  if (range.points < 2 || !(range.rai_min < range.rai_max)) {
    throw PreconditionError("curve range needs at least two points on a non-empty interval");
  }

  std::vector<DetectionCurve> curves;
  curves.reserve(thetas.size());
  const double step =
      (range.rai_max - range.rai_min) / static_cast<double>(range.points - 1);
  for (double theta : thetas) {
    DetectionCurve c;
    c.theta = theta;
    c.inflection_rai = -theta / kappa;
    c.pr_at_inflection = detection_prob(c.inflection_rai, kappa, theta, pi0);
    c.rai.reserve(range.points);
    c.pr.reserve(range.points);
    for (std::size_t i = 0; i < range.points; ++i) {
      const double x = range.rai_min + step * static_cast<double>(i);
      c.rai.push_back(x);
      c.pr.push_back(detection_prob(x, kappa, theta, pi0));
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

BandSpec BandSpec::defaults() {
  BandSpec spec;
  spec.step_time_offsets = {-1.0, 0.0, 1.0};
  spec.step_scales = {0.8, 1.0, 1.2};
  spec.parameters.push_back(
      {"p_max", default_grid(SweepParameter::p_max)});
  return spec;
}

namespace {

struct MemberSeries {
  std::vector<double> p, d, rai, r;
};

MemberSeries evaluate_member(const ModelParams& params,
                             std::span<const double> grid) {
  auto tr = sample_on_grid(params, grid);
  return {std::move(tr.p), std::move(tr.d), std::move(tr.rai),
          std::move(tr.cumulative_risk)};
}

void fold(Envelope& env, const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    env.lower[i] = std::min(env.lower[i], values[i]);
    env.upper[i] = std::max(env.upper[i], values[i]);
  }
}

Envelope seed_envelope(const std::vector<double>& nominal) {
  return {nominal, nominal, nominal};
}

}  // namespace

UncertaintyBand uncertainty_band(const ModelParams& nominal,
                                 const BandSpec& band) {
  validate(nominal);
  if (!(band.resolution >= 1.0) || !std::isfinite(band.resolution)) {
    throw PreconditionError("band resolution must be >= 1 sample per year");
  }
  for (const auto& [name, values] : band.parameters) {
    (void)get_param(nominal, name);
    if (values.empty()) {
      throw PreconditionError("band parameter '" + name + "' has no values");
    }
  }

  UncertaintyBand out;
  const double T = nominal.horizon;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) / band.resolution;
    if (t > T - 1e-9) break;
    out.t.push_back(t);
  }
  out.t.push_back(T);

  // Cartesian product: offsets x scales x parameter axes.
  const std::vector<double> offsets =
      band.step_time_offsets.empty() ? std::vector<double>{0.0}
                                     : band.step_time_offsets;
  const std::vector<double> scales =
      band.step_scales.empty() ? std::vector<double>{1.0} : band.step_scales;
  std::vector<std::size_t> radix = {offsets.size(), scales.size()};
  for (const auto& axis : band.parameters) radix.push_back(axis.second.size());
  std::size_t total = 1;
  for (auto n : radix) total *= n;

  auto member_params = [&](std::size_t index) {
    ModelParams p = nominal;
    std::vector<std::size_t> digit(radix.size());
    for (std::size_t a = 0; a < radix.size(); ++a) {
      digit[a] = index % radix[a];
      index /= radix[a];
    }
    for (auto& step : p.det.steps) {
      step.time += offsets[digit[0]];
      step.delta *= scales[digit[1]];
    }
    for (std::size_t a = 0; a < band.parameters.size(); ++a) {
      set_param(p, band.parameters[a].first,
                band.parameters[a].second[digit[a + 2]]);
    }
    return p;
  };

  const MemberSeries base = evaluate_member(nominal, out.t);
  out.p = seed_envelope(base.p);
  out.d = seed_envelope(base.d);
  out.rai = seed_envelope(base.rai);
  out.r = seed_envelope(base.r);

  std::vector<MemberSeries> series(total);
  std::vector<char> valid(total, 0);
  parallel_for(total, [&](std::size_t i) {
    const ModelParams p = member_params(i);
    try {
      validate(p);
    } catch (const ValidationError&) {
      return;
    }
    series[i] = evaluate_member(p, out.t);
    valid[i] = 1;
  });

  out.members = 1;
  for (std::size_t i = 0; i < total; ++i) {
    if (!valid[i]) {
      ++out.skipped;
      continue;
    }
    ++out.members;
    fold(out.p, series[i].p);
    fold(out.d, series[i].d);
    fold(out.rai, series[i].rai);
    fold(out.r, series[i].r);
  }
  return out;
}

}  // namespace techrace
