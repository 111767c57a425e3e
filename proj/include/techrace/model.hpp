#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace techrace {

struct DetStep {
  double time = 0.0;   // years
  double delta = 0.0;  // capability points added at `time`
};

// Stepwise detection capability. Right-continuous: a step applies at
// exactly its own time.
struct DetSchedule {
  double d0 = 50.0;
  std::vector<DetStep> steps;

  double value_at(double t) const;
  // Left limit D(t-).
  double value_before(double t) const;
};

// Detection slope that changes once, e.g. a moonshot package whose
// sensor-fusion gain only arrives with its first upgrade.
struct KappaSwitch {
  double time = 1.0;
  double initial_kappa = 0.4;
};

// Full parameter vector. Defaults are the Limited AI baseline with
// opportunism disabled.
struct ModelParams {
  double p0 = 20.0;
  double g_p = 0.23;
  double p_max = 120.0;
  double kappa = 0.4;
  double theta = 0.0;
  double pi0 = 0.10;
  double lambda0 = 0.05;
  double eta = 0.0;
  double beta = 0.10;
  double tau = 40.0;
  DetSchedule det{50.0, {{3.0, 5.0}, {7.0, 4.0}}};
  double horizon = 10.0;
  std::optional<KappaSwitch> kappa_switch;

  double d0() const noexcept { return det.d0; }
  double kappa_at(double t) const;
  double kappa_before(double t) const;
};

// Throws ValidationError listing every violated invariant.
void validate(const ModelParams& params);

// Scalar parameter access by its snake_case name (p0, d0, g_p, p_max,
// kappa, theta, pi0, lambda0, eta, beta, tau, horizon).
const std::vector<std::string>& scalar_param_names();
double get_param(const ModelParams& params, std::string_view name);
void set_param(ModelParams& params, std::string_view name, double value);

// Numerically stable 1 / (1 + e^{-x}).
double logistic(double x);

double pet_capability(double t, const ModelParams& params);
double det_capability(double t, const DetSchedule& schedule);
double relative_advantage(double t, const ModelParams& params);

// Time at which the PET logistic reaches `level`. -inf when level <= 0,
// +inf when level >= p_max. May be negative when level < p0.
double pet_time_to_reach(double level, const ModelParams& params);

double detection_prob(double rai, double kappa, double theta, double pi0);
// 1 - detection_prob, evaluated without cancellation.
double evasion_prob(double rai, double kappa, double theta, double pi0);
double hazard_rate(double rai, double lambda0, double eta, double beta,
                   double tau);

// Instantaneous rate of undetected attempts at time t.
double risk_integrand(double t, const ModelParams& params,
                      double rai_shift = 0.0);

// 0, every DET step and kappa switch inside (0, T), and T.
std::vector<double> breakpoints(const ModelParams& params);

// Absolute tolerance applied to the whole-horizon risk integral.
inline constexpr double kRiskTolerance = 1e-8;

// Expected number of undetected attempts over [0, horizon].
double cumulative_risk(const ModelParams& params);
// Same integral with RAI(t) replaced by RAI(t) + rai_shift in both the
// detection and hazard terms.
double cumulative_risk_shifted(const ModelParams& params, double rai_shift);
// R(t) at every time of a sorted grid inside [0, horizon].
std::vector<double> cumulative_risk_on_grid(const ModelParams& params,
                                            std::span<const double> grid);

// P(at least one) = 1 - e^{-r}. Throws DomainError for r < 0 or NaN.
double breakout_prob(double r);

struct CrossingReport {
  std::vector<double> sign_changes;
  std::optional<double> first_persistent;
};

// Times where RAI(t) - level switches between negative and non-negative.
// crossing_times() is the level-0 case.
CrossingReport threshold_crossings(const ModelParams& params, double level);
CrossingReport crossing_times(const ModelParams& params);

struct BoundEstimate {
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  double zeta = 0.0;
};

// Two-sided bound on R(T) valid when RAI(t) >= tau + delta on [0, T].
BoundEstimate risk_bounds(const ModelParams& params, double delta);

struct Trajectory {
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> d;
  std::vector<double> rai;
  std::vector<double> pr_detect;
  std::vector<double> hazard;
  std::vector<double> integrand;
  std::vector<double> cumulative_risk;

  std::size_t size() const noexcept { return t.size(); }
};

// Uniform grid of `resolution` samples per year plus every DET step time,
// sampled twice at each step (left limit, then the post-step value).
Trajectory sample_trajectory(const ModelParams& params, double resolution);

// Samples a sorted grid with right-continuous detection everywhere.
Trajectory sample_on_grid(const ModelParams& params,
                          std::span<const double> grid);

}  // namespace techrace
