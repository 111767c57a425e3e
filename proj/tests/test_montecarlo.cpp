#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "frozen_values.hpp"
#include "techrace/error.hpp"
#include "techrace/montecarlo.hpp"

namespace techrace {
namespace {

MCConfig config_for(const char* preset, std::uint64_t trials, std::uint64_t seed = 7) {
  return MCConfig{build_preset(preset), trials, seed, std::nullopt, 0};
}

TEST(SplitMix, StreamsDifferPerTrial) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 1000; ++i) firsts.insert(SplitMix64::for_trial(1, i)());
  EXPECT_EQ(firsts.size(), 1000u);
  auto a = SplitMix64::for_trial(1, 5);
  auto b = SplitMix64::for_trial(1, 5);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a(), b());
}

TEST(SplitMix, UniformInUnitInterval) {
  SplitMix64 g(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(PeakHazard, BoundedByEnvelope) {
  const ModelParams p = build_preset("transformative/baseline/opp");
  const double peak = peak_hazard(p);
  EXPECT_LE(peak, p.lambda0 * (1.0 + p.eta));
  const Trajectory tr = sample_trajectory(p, 200.0);
  for (double h : tr.hazard) EXPECT_LE(h, peak * (1.0 + 1e-12));
  EXPECT_NEAR(peak, *std::max_element(tr.hazard.begin(), tr.hazard.end()), 1e-12);
  EXPECT_NEAR(peak_hazard(build_preset("limited/baseline/no-opp")), 0.05, 1e-15);
}

TEST(Simulate, ZeroHazardIsExactlyZero) {
  MCConfig c = config_for("disruptive/baseline/opp", 2000);
  c.params.lambda0 = 0.0;
  const MCResult r = simulate(c);
  EXPECT_EQ(r.mean_undetected.value, 0.0);
  EXPECT_EQ(r.p_at_least_one.value, 0.0);
  EXPECT_EQ(r.attempts, 0u);
}

TEST(Simulate, CertainDetectionIsExactlyZero) {
  // pi0 = 1 is outside the parameter domain; a vanishing evasion term has
  // the same effect.
  MCConfig c = config_for("transformative/baseline/opp", 2000);
  c.params.theta = -1e6;
  const MCResult r = simulate(c);
  EXPECT_GT(r.attempts, 0u);
  EXPECT_EQ(r.undetected, 0u);
  EXPECT_EQ(r.mean_undetected.value, 0.0);

  c.params.pi0 = 1.0;
  EXPECT_THROW(simulate(c), ValidationError);
}

TEST(Simulate, RejectsLowThinningRate) {
  MCConfig c = config_for("transformative/baseline/opp", 10);
  c.max_rate = 0.1;
  EXPECT_THROW(simulate(c), PreconditionError);
  c.max_rate = 0.5;
  EXPECT_NO_THROW(simulate(c));
  c.trials = 0;
  EXPECT_THROW(simulate(c), PreconditionError);
}

TEST(Simulate, BitwiseDeterministicAcrossThreadCounts) {
  MCConfig c = config_for("disruptive/baseline/opp", 50000, 99);
  c.threads = 1;
  const MCResult serial = simulate(c);
  c.threads = 8;
  const MCResult parallel = simulate(c);
  EXPECT_EQ(serial.undetected, parallel.undetected);
  EXPECT_EQ(serial.attempts, parallel.attempts);
  EXPECT_EQ(serial.mean_undetected.value, parallel.mean_undetected.value);
  EXPECT_EQ(serial.mean_undetected.ci99_half_width, parallel.mean_undetected.ci99_half_width);
  EXPECT_EQ(serial.p_at_least_one.value, parallel.p_at_least_one.value);

  c.seed = 100;
  EXPECT_NE(simulate(c).undetected, serial.undetected);
}

TEST(Simulate, HalfWidthShrinksLikeRootN) {
  const MCResult a = simulate(config_for("transformative/baseline/opp", 40000, 1));
  const MCResult b = simulate(config_for("transformative/baseline/opp", 80000, 2));
  const double ratio = a.mean_undetected.ci99_half_width / b.mean_undetected.ci99_half_width;
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.15 * std::sqrt(2.0));
}

TEST(Simulate, PoissonLawOfUndetectedCount) {
  const MCResult r = simulate(config_for("transformative/baseline/opp", 100000, 11));
  const double implied = 1.0 - std::exp(-r.mean_undetected.value);
  EXPECT_TRUE(r.p_at_least_one.contains(implied))
      << r.p_at_least_one.value << " vs " << implied;
}

TEST(Validate, LimitedBaselineInsideInterval) {
  const ValidationReport v =
      validate(build_preset("limited/baseline/no-opp"), 100000, 2025, "limited");
  EXPECT_NEAR(v.analytic_r, frozen::kRLimitedBaseline, 1e-8);
  EXPECT_TRUE(v.r_inside);
  EXPECT_TRUE(v.p_inside);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(v.inconclusive);
}

TEST(Validate, TransformativeOpportunisticProbability) {
  const auto& c = PresetCatalog::builtin();
  const ValidationReport v =
      validate(c, c.spec("transformative/baseline/opp"), 100000, 42);
  EXPECT_TRUE(v.pass);
  EXPECT_NEAR(v.mc.p_at_least_one.value, 0.738, 0.01);
}

TEST(Validate, SingleTrialIsInconclusive) {
  const ValidationReport v = validate(build_preset("limited/baseline/no-opp"), 1, 1);
  EXPECT_TRUE(v.inconclusive);
  EXPECT_TRUE(std::isinf(v.mc.mean_undetected.ci99_half_width));
}

}  // namespace
}  // namespace techrace
