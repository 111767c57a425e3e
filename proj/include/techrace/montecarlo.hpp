#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "techrace/model.hpp"
#include "techrace/scenario.hpp"

namespace techrace {

// z-score of a two-sided 99% normal interval.
inline constexpr double kZ99 = 2.5758293035489004;

struct MCConfig {
  ModelParams params;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 20250101;
  // Thinning envelope; defaults to lambda0 * (1 + eta).
  std::optional<double> max_rate;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct Estimate {
  double value = 0.0;
  double ci99_half_width = 0.0;

  double lower() const noexcept { return value - ci99_half_width; }
  double upper() const noexcept { return value + ci99_half_width; }
  bool contains(double x) const noexcept { return x >= lower() && x <= upper(); }
};

struct MCResult {
  Estimate mean_undetected;
  Estimate p_at_least_one;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double max_rate = 0.0;
  std::uint64_t attempts = 0;
  std::uint64_t undetected = 0;
  std::uint64_t trials_with_undetected = 0;
};

// Supremum of the hazard over [0, horizon].
double peak_hazard(const ModelParams& params);

// Splittable counter-based generator: each trial owns the stream seeded by
// mix(seed, trial), independent of scheduling.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) noexcept : state_(state) {}
  static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }
  result_type operator()() noexcept;

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

 private:
  std::uint64_t state_;
};

// Breakout attempts as a non-homogeneous Poisson process by thinning, each
// accepted attempt undetected with probability 1 - Pr(D_t).
MCResult simulate(const MCConfig& config);

struct ValidationReport {
  std::string scenario;
  double analytic_r = 0.0;
  double analytic_p = 0.0;
  MCResult mc;
  bool r_inside = false;
  bool p_inside = false;
  bool inconclusive = false;  // interval too wide to discriminate
  bool pass = false;          // both analytic values inside their 99% CIs
};

ValidationReport validate(const ModelParams& params, std::uint64_t trials,
                          std::uint64_t seed, std::string label = {});
ValidationReport validate(const PresetCatalog& catalog, const ScenarioSpec& spec,
                          std::uint64_t trials, std::uint64_t seed);

}  // namespace techrace
