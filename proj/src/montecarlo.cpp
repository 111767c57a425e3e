#include "techrace/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "techrace/error.hpp"
#include "techrace/parallel.hpp"

namespace techrace {
namespace {

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct TrialCounts {
  std::uint64_t attempts = 0;
  std::uint64_t undetected = 0;
  std::uint64_t undetected_sq = 0;
  std::uint64_t hit_trials = 0;

  void add(const TrialCounts& o) noexcept {
    attempts += o.attempts;
    undetected += o.undetected;
    undetected_sq += o.undetected_sq;
    hit_trials += o.hit_trials;
  }
};

std::uint64_t run_trial(const ModelParams& p, double max_rate,
                        SplitMix64& rng, std::uint64_t& attempts) {
  std::uint64_t undetected = 0;
  double t = 0.0;
  for (;;) {
    t += -std::log1p(-rng.uniform()) / max_rate;
    if (t > p.horizon) break;
    const double rai = relative_advantage(t, p);
    const double rate = hazard_rate(rai, p.lambda0, p.eta, p.beta, p.tau);
    if (rng.uniform() * max_rate >= rate) continue;
    ++attempts;
    if (rng.uniform() < evasion_prob(rai, p.kappa_at(t), p.theta, p.pi0)) {
      ++undetected;
    }
  }
  return undetected;
}

}  // namespace

SplitMix64 SplitMix64::for_trial(std::uint64_t seed,
                                 std::uint64_t trial) noexcept {
  return SplitMix64(mix64(seed ^ mix64(trial + 0x9e3779b97f4a7c15ULL)));
}

SplitMix64::result_type SplitMix64::operator()() noexcept {
  state_ += 0x9e3779b97f4a7c15ULL;
  return mix64(state_);
}

double SplitMix64::uniform() noexcept {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double peak_hazard(const ModelParams& params) {
  validate(params);
  // RAI peaks just before a DET step or at the horizon.
  double peak_rai = -std::numeric_limits<double>::infinity();
  for (const auto& step : params.det.steps) {
    if (step.time > params.horizon) break;
    peak_rai = std::max(peak_rai, pet_capability(step.time, params) -
                                      params.det.value_before(step.time));
  }
  peak_rai = std::max(peak_rai, relative_advantage(params.horizon, params));
  return hazard_rate(peak_rai, params.lambda0, params.eta, params.beta,
                     params.tau);
}

MCResult simulate(const MCConfig& config) {
  const ModelParams& p = config.params;
  validate(p);
  if (config.trials < 1) throw PreconditionError("trials must be >= 1");
  const double max_rate =
      config.max_rate.value_or(p.lambda0 * (1.0 + p.eta));
  const double peak = peak_hazard(p);
  if (!(max_rate >= peak * (1.0 - 1e-12))) {
    throw PreconditionError(fmt::format(
        "thinning rate {:g} is below the peak hazard {:g}", max_rate, peak));
  }

  MCResult result;
  result.trials = config.trials;
  result.seed = config.seed;
  result.max_rate = max_rate;

  TrialCounts total;
  if (max_rate > 0.0) {
    constexpr std::uint64_t kChunk = 4096;
    const std::uint64_t chunks = (config.trials + kChunk - 1) / kChunk;
    std::vector<TrialCounts> partial(chunks);
    parallel_for(
        chunks,
        [&](std::size_t c) {
          const std::uint64_t begin = c * kChunk;
          const std::uint64_t end = std::min(config.trials, begin + kChunk);
          TrialCounts& acc = partial[c];
          for (std::uint64_t i = begin; i < end; ++i) {
            auto rng = SplitMix64::for_trial(config.seed, i);
            const std::uint64_t k = run_trial(p, max_rate, rng, acc.attempts);
            acc.undetected += k;
            acc.undetected_sq += k * k;
            acc.hit_trials += k > 0 ? 1 : 0;
          }
        },
        config.threads);
    for (const auto& part : partial) total.add(part);
  }

  const double n = static_cast<double>(config.trials);
  const double mean = static_cast<double>(total.undetected) / n;
  const double share = static_cast<double>(total.hit_trials) / n;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double mean_hw = kInf;
  double share_hw = kInf;
  if (config.trials > 1) {
    const double var =
        std::max(0.0, (static_cast<double>(total.undetected_sq) - n * mean * mean) /
                          (n - 1.0));
    mean_hw = kZ99 * std::sqrt(var / n);
    share_hw = kZ99 * std::sqrt(share * (1.0 - share) / n);
  }

  result.mean_undetected = {mean, mean_hw};
  result.p_at_least_one = {share, share_hw};
  result.attempts = total.attempts;
  result.undetected = total.undetected;
  result.trials_with_undetected = total.hit_trials;
  return result;
}

ValidationReport validate(const ModelParams& params, std::uint64_t trials,
                          std::uint64_t seed, std::string label) {
  ValidationReport report;
  report.scenario = std::move(label);
  report.analytic_r = cumulative_risk(params);
  report.analytic_p = breakout_prob(report.analytic_r);
  report.mc = simulate(MCConfig{params, trials, seed, std::nullopt, 0});
  report.r_inside = report.mc.mean_undetected.contains(report.analytic_r);
  report.p_inside = report.mc.p_at_least_one.contains(report.analytic_p);
  const auto& pe = report.mc.p_at_least_one;
  report.inconclusive = !std::isfinite(pe.ci99_half_width) ||
                        (pe.lower() <= 0.0 && pe.upper() >= 1.0);
  report.pass = report.r_inside && report.p_inside;
  return report;
}

ValidationReport validate(const PresetCatalog& catalog, const ScenarioSpec& spec,
                          std::uint64_t trials, std::uint64_t seed) {
  return validate(catalog.build(spec), trials, seed, spec.name);
}

}  // namespace techrace
