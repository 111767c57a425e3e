#include "techrace/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "techrace/error.hpp"
#include "techrace/quadrature.hpp"

namespace techrace {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrand with the detection level and slope frozen, valid anywhere
// inside a single smooth segment.
double segment_integrand(double t, const ModelParams& params, double d_level,
                         double kappa, double rai_shift) {
  const double rai = pet_capability(t, params) - d_level + rai_shift;
  return hazard_rate(rai, params.lambda0, params.eta, params.beta,
                     params.tau) *
         evasion_prob(rai, kappa, params.theta, params.pi0);
}

double integrate_piece(const ModelParams& params, double a, double b,
                       double rai_shift, double abs_tol) {
  if (b <= a) return 0.0;
  const double mid = 0.5 * (a + b);
  const double d_level = params.det.value_at(mid);
  const double kappa = params.kappa_at(mid);
  auto f = [&](double t) {
    return segment_integrand(t, params, d_level, kappa, rai_shift);
  };
  return integrate_adaptive(f, a, b, abs_tol).value;
}

// Times in (0, horizon] where detection or its slope jumps.
std::vector<double> discontinuities(const ModelParams& params) {
  std::vector<double> out;
  for (const auto& step : params.det.steps) {
    if (step.time > 0.0 && step.time <= params.horizon) out.push_back(step.time);
  }
  if (params.kappa_switch && params.kappa_switch->time > 0.0 &&
      params.kappa_switch->time <= params.horizon) {
    out.push_back(params.kappa_switch->time);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void check_finite(std::vector<FieldIssue>& issues, const char* name,
                  double value) {
  if (!std::isfinite(value)) issues.push_back({name, "must be finite"});
}

}  // namespace

double DetSchedule::value_at(double t) const {
  double d = d0;
  for (const auto& step : steps) {
    if (t >= step.time) d += step.delta;
  }
  return d;
}

double DetSchedule::value_before(double t) const {
  double d = d0;
  for (const auto& step : steps) {
    if (t > step.time) d += step.delta;
  }
  return d;
}

double ModelParams::kappa_at(double t) const {
  if (kappa_switch && t < kappa_switch->time) return kappa_switch->initial_kappa;
  return kappa;
}

double ModelParams::kappa_before(double t) const {
  if (kappa_switch && t <= kappa_switch->time) return kappa_switch->initial_kappa;
  return kappa;
}

void validate(const ModelParams& params) {
  std::vector<FieldIssue> issues;
  const struct {
    const char* name;
    double value;
  } scalars[] = {{"p0", params.p0},         {"d0", params.det.d0},
                 {"g_p", params.g_p},       {"p_max", params.p_max},
                 {"kappa", params.kappa},   {"theta", params.theta},
                 {"pi0", params.pi0},       {"lambda0", params.lambda0},
                 {"eta", params.eta},       {"beta", params.beta},
                 {"tau", params.tau},       {"horizon", params.horizon}};
  for (const auto& s : scalars) check_finite(issues, s.name, s.value);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  if (!(params.p0 > 0.0)) issues.push_back({"p0", "must be > 0"});
  if (!(params.p0 < params.p_max)) issues.push_back({"p_max", "must exceed p0"});
  if (!(params.det.d0 > 0.0)) issues.push_back({"d0", "must be > 0"});
  if (!(params.g_p > 0.0)) issues.push_back({"g_p", "must be > 0"});
  if (!(params.kappa > 0.0)) issues.push_back({"kappa", "must be > 0"});
  if (!(params.beta > 0.0)) issues.push_back({"beta", "must be > 0"});
  if (!(params.pi0 >= 0.0 && params.pi0 < 1.0)) {
    issues.push_back({"pi0", "must lie in [0, 1)"});
  }
  if (!(params.lambda0 >= 0.0)) issues.push_back({"lambda0", "must be >= 0"});
  if (!(params.eta >= 0.0)) issues.push_back({"eta", "must be >= 0"});
  if (!(params.horizon > 0.0)) issues.push_back({"horizon", "must be > 0"});

  double previous = 0.0;
  for (std::size_t i = 0; i < params.det.steps.size(); ++i) {
    const auto& step = params.det.steps[i];
    const std::string field = "det_steps[" + std::to_string(i) + "]";
    if (!std::isfinite(step.time) || !std::isfinite(step.delta)) {
      issues.push_back({field, "must be finite"});
      continue;
    }
    if (!(step.time > previous)) {
      issues.push_back({field + ".t", "step times must be > 0 and strictly increasing"});
    }
    if (!(step.delta > 0.0)) issues.push_back({field + ".delta", "must be > 0"});
    previous = step.time;
  }
  if (params.kappa_switch) {
    if (!(params.kappa_switch->time > 0.0) ||
        !std::isfinite(params.kappa_switch->time)) {
      issues.push_back({"kappa_switch.time", "must be finite and > 0"});
    }
    if (!(params.kappa_switch->initial_kappa > 0.0) ||
        !std::isfinite(params.kappa_switch->initial_kappa)) {
      issues.push_back({"kappa_switch.initial_kappa", "must be finite and > 0"});
    }
  }
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

const std::vector<std::string>& scalar_param_names() {
  static const std::vector<std::string> names = {
      "p0",  "d0",    "g_p",     "p_max", "kappa", "theta",
      "pi0", "lambda0", "eta",   "beta",  "tau",   "horizon"};
  return names;
}

namespace {

double* param_slot(ModelParams& p, std::string_view name) {
  if (name == "p0") return &p.p0;
  if (name == "d0") return &p.det.d0;
  if (name == "g_p") return &p.g_p;
  if (name == "p_max") return &p.p_max;
  if (name == "kappa") return &p.kappa;
  if (name == "theta") return &p.theta;
  if (name == "pi0") return &p.pi0;
  if (name == "lambda0") return &p.lambda0;
  if (name == "eta") return &p.eta;
  if (name == "beta") return &p.beta;
  if (name == "tau") return &p.tau;
  if (name == "horizon") return &p.horizon;
  throw LookupError("parameter", std::string(name), scalar_param_names());
}

}  // namespace

double get_param(const ModelParams& params, std::string_view name) {
  return *param_slot(const_cast<ModelParams&>(params), name);
}

void set_param(ModelParams& params, std::string_view name, double value) {
  *param_slot(params, name) = value;
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double pet_capability(double t, const ModelParams& params) {
  const double shape = params.p_max / params.p0 - 1.0;
  return params.p_max / (1.0 + shape * std::exp(-params.g_p * t));
}

double det_capability(double t, const DetSchedule& schedule) {
  return schedule.value_at(t);
}

double relative_advantage(double t, const ModelParams& params) {
  return pet_capability(t, params) - params.det.value_at(t);
}

double pet_time_to_reach(double level, const ModelParams& params) {
  if (level <= 0.0) return -kInf;
  if (level >= params.p_max) return kInf;
  const double shape = params.p_max / params.p0 - 1.0;
  return std::log(shape * level / (params.p_max - level)) / params.g_p;
}

double detection_prob(double rai, double kappa, double theta, double pi0) {
  return pi0 + (1.0 - pi0) * logistic(-(kappa * rai + theta));
}

double evasion_prob(double rai, double kappa, double theta, double pi0) {
  return (1.0 - pi0) * logistic(kappa * rai + theta);
}

double hazard_rate(double rai, double lambda0, double eta, double beta,
                   double tau) {
  return lambda0 * (1.0 + eta * logistic(beta * (rai - tau)));
}

double risk_integrand(double t, const ModelParams& params, double rai_shift) {
  return segment_integrand(t, params, params.det.value_at(t),
                           params.kappa_at(t), rai_shift);
}

std::vector<double> breakpoints(const ModelParams& params) {
  std::vector<double> out{0.0};
  for (double t : discontinuities(params)) {
    if (t < params.horizon) out.push_back(t);
  }
  out.push_back(params.horizon);
  return out;
}

double cumulative_risk_shifted(const ModelParams& params, double rai_shift) {
  validate(params);
  if (!std::isfinite(rai_shift)) {
    throw ValidationError("shift", "must be finite");
  }
  const auto edges = breakpoints(params);
  const double tol = kRiskTolerance / static_cast<double>(edges.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    total += integrate_piece(params, edges[i], edges[i + 1], rai_shift, tol);
  }
  return total;
}

double cumulative_risk(const ModelParams& params) {
  return cumulative_risk_shifted(params, 0.0);
}

std::vector<double> cumulative_risk_on_grid(const ModelParams& params,
                                            std::span<const double> grid) {
  validate(params);
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      (!grid.empty() && (grid.front() < 0.0 || grid.back() > params.horizon))) {
    throw PreconditionError("grid must be sorted and inside [0, horizon]");
  }
  const auto cuts = discontinuities(params);
  const double tol = kRiskTolerance /
                     static_cast<double>(grid.size() + cuts.size() + 1);

  std::vector<double> out;
  out.reserve(grid.size());
  double running = 0.0;
  double from = 0.0;
  auto cut = cuts.begin();
  for (double to : grid) {
    while (cut != cuts.end() && *cut <= from) ++cut;
    double a = from;
    for (auto c = cut; c != cuts.end() && *c < to; ++c) {
      running += integrate_piece(params, a, *c, 0.0, tol);
      a = *c;
    }
    running += integrate_piece(params, a, to, 0.0, tol);
    from = std::max(from, to);
    out.push_back(running);
  }
  return out;
}

double breakout_prob(double r) {
  if (!(r >= 0.0)) {
    throw DomainError("breakout_prob requires an expected count r >= 0");
  }
  return -std::expm1(-r);
}

CrossingReport threshold_crossings(const ModelParams& params, double level) {
  validate(params);
  CrossingReport report;
  const double horizon = params.horizon;

  std::vector<double> edges{0.0};
  for (const auto& step : params.det.steps) {
    if (step.time < horizon) edges.push_back(step.time);
  }
  edges.push_back(horizon);

  auto gap = [&](double t, double d_level) {
    return pet_capability(t, params) - d_level - level;
  };

  double d_level = params.det.value_at(0.0);
  const double start_gap = gap(0.0, d_level);
  bool ahead = start_gap >= 0.0;
  if (start_gap == 0.0) report.sign_changes.push_back(0.0);

  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double a = edges[i];
    const double b = edges[i + 1];
    if (i > 0) {
      d_level = params.det.value_at(a);
      const bool now_ahead = gap(a, d_level) >= 0.0;
      if (now_ahead != ahead) report.sign_changes.push_back(a);
      ahead = now_ahead;
    }
    if (!ahead) {
      const double root = pet_time_to_reach(d_level + level, params);
      const bool last = (i + 2 == edges.size());
      if (root > a && (root < b || (last && root <= b))) {
        report.sign_changes.push_back(root);
        ahead = true;
      }
    }
  }

  if (ahead) {
    report.first_persistent =
        report.sign_changes.empty() ? 0.0 : report.sign_changes.back();
  }
  return report;
}

CrossingReport crossing_times(const ModelParams& params) {
  return threshold_crossings(params, 0.0);
}

BoundEstimate risk_bounds(const ModelParams& params, double delta) {
  validate(params);
  if (!(delta > 0.0)) throw PreconditionError("risk_bounds requires delta > 0");

  BoundEstimate b;
  b.epsilon = logistic(-params.beta * delta);
  b.zeta = std::min(1.0, (1.0 - params.pi0) *
                             std::exp(-(params.kappa * (params.tau + delta) +
                                        params.theta)));
  const double T = params.horizon;
  b.upper = params.lambda0 * (1.0 + params.eta) * (1.0 - params.pi0) * T;
  const double evade_floor = 1.0 - params.pi0 - b.zeta;
  b.lower = evade_floor <= 0.0
                ? 0.0
                : params.lambda0 * (1.0 + params.eta * (1.0 - b.epsilon)) *
                      evade_floor * T;
  return b;
}

namespace {

struct SamplePoint {
  double t;
  bool left_limit;
};

Trajectory evaluate_points(const ModelParams& params,
                           const std::vector<SamplePoint>& points) {
  std::vector<double> distinct;
  distinct.reserve(points.size());
  for (const auto& pt : points) {
    if (distinct.empty() || pt.t > distinct.back()) distinct.push_back(pt.t);
  }
  const auto running = cumulative_risk_on_grid(params, distinct);

  Trajectory tr;
  const std::size_t n = points.size();
  for (auto* v : {&tr.t, &tr.p, &tr.d, &tr.rai, &tr.pr_detect, &tr.hazard,
                  &tr.integrand, &tr.cumulative_risk}) {
    v->reserve(n);
  }
  std::size_t k = 0;
  for (const auto& pt : points) {
    while (distinct[k] < pt.t) ++k;
    const double p = pet_capability(pt.t, params);
    const double d = pt.left_limit ? params.det.value_before(pt.t)
                                   : params.det.value_at(pt.t);
    const double kappa =
        pt.left_limit ? params.kappa_before(pt.t) : params.kappa_at(pt.t);
    const double rai = p - d;
    const double hazard = hazard_rate(rai, params.lambda0, params.eta,
                                      params.beta, params.tau);
    tr.t.push_back(pt.t);
    tr.p.push_back(p);
    tr.d.push_back(d);
    tr.rai.push_back(rai);
    tr.pr_detect.push_back(
        detection_prob(rai, kappa, params.theta, params.pi0));
    tr.hazard.push_back(hazard);
    tr.integrand.push_back(hazard *
                           evasion_prob(rai, kappa, params.theta, params.pi0));
    tr.cumulative_risk.push_back(running[k]);
  }
  return tr;
}

}  // namespace

Trajectory sample_trajectory(const ModelParams& params, double resolution) {
  validate(params);
  if (!(resolution >= 1.0) || !std::isfinite(resolution)) {
    throw PreconditionError("resolution must be >= 1 sample per year");
  }
  const double T = params.horizon;
  const auto jumps = discontinuities(params);
  constexpr double kSnap = 1e-9;

  std::vector<double> uniform;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) / resolution;
    if (t > T - kSnap) break;
    uniform.push_back(t);
  }
  uniform.push_back(T);

  std::vector<SamplePoint> points;
  points.reserve(uniform.size() + 2 * jumps.size());
  auto jump = jumps.begin();
  auto emit_jump = [&](double t) {
    points.push_back({t, true});
    points.push_back({t, false});
  };
  for (double t : uniform) {
    while (jump != jumps.end() && *jump < t - kSnap) emit_jump(*jump++);
    if (jump != jumps.end() && std::abs(*jump - t) <= kSnap) {
      emit_jump(*jump++);
    } else {
      points.push_back({t, false});
    }
  }
  while (jump != jumps.end()) emit_jump(*jump++);
  return evaluate_points(params, points);
}

Trajectory sample_on_grid(const ModelParams& params,
                          std::span<const double> grid) {
  std::vector<SamplePoint> points;
  points.reserve(grid.size());
  for (double t : grid) points.push_back({t, false});
  return evaluate_points(params, points);
}

}  // namespace techrace
