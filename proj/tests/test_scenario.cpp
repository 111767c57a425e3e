#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "frozen_values.hpp"
#include "techrace/error.hpp"
#include "techrace/scenario.hpp"

namespace techrace {
namespace {

const PresetCatalog& catalog() { return PresetCatalog::builtin(); }

TEST(Catalog, TwelveNamedVariants) {
  const auto names = catalog().names();
  ASSERT_EQ(names.size(), 12u);
  EXPECT_EQ(names.front(), "limited/baseline/no-opp");
  EXPECT_EQ(names.back(), "transformative/moonshot/opp");
  for (const auto& name : names) {
    const ScenarioSpec spec = catalog().spec(name);
    EXPECT_EQ(spec.name, name);
    EXPECT_EQ(preset_name(spec.regime, spec.det, spec.opportunistic), name);
  }
}

TEST(Catalog, DisplayNames) {
  const auto& c = catalog();
  EXPECT_EQ(c.display_name(c.spec("limited/baseline/no-opp")), "Limited AI");
  EXPECT_EQ(c.display_name(c.spec("disruptive/moonshot/no-opp")),
            "Disruptive AI + Moonshot");
  EXPECT_EQ(c.display_name(c.spec("transformative/baseline/opp")),
            "Transformative AI + Opportunistic");
  EXPECT_EQ(c.display_name(c.spec("transformative/moonshot/opp")),
            "Transformative AI + Both");
}

TEST(Catalog, CalibratedValues) {
  const ModelParams t = build_preset("transformative/baseline/opp");
  EXPECT_DOUBLE_EQ(t.g_p, 1.19);
  EXPECT_DOUBLE_EQ(t.eta, 3.0);
  EXPECT_DOUBLE_EQ(catalog().regime(PetRegime::transformative).g_p_table2, 1.189);

  const ModelParams m = build_preset("disruptive/moonshot/no-opp");
  EXPECT_DOUBLE_EQ(m.g_p, 0.33);
  EXPECT_DOUBLE_EQ(m.kappa, 0.6);
  EXPECT_DOUBLE_EQ(m.eta, 0.0);
  ASSERT_EQ(m.det.steps.size(), 3u);
  EXPECT_DOUBLE_EQ(m.det.value_at(6.0), 82.0);
  EXPECT_FALSE(m.kappa_switch.has_value());

  const ModelParams b = build_preset("limited/baseline/no-opp");
  EXPECT_DOUBLE_EQ(b.p0, 20.0);
  EXPECT_DOUBLE_EQ(b.det.d0, 50.0);
  EXPECT_DOUBLE_EQ(b.p_max, 120.0);
  EXPECT_DOUBLE_EQ(b.pi0, 0.10);
  EXPECT_DOUBLE_EQ(b.lambda0, 0.05);
  EXPECT_DOUBLE_EQ(b.beta, 0.10);
  EXPECT_DOUBLE_EQ(b.tau, 40.0);
  EXPECT_DOUBLE_EQ(b.horizon, 10.0);
}

TEST(Catalog, UnknownNameListsValidOnes) {
  try {
    (void)catalog().spec("no-such");
    FAIL();
  } catch (const LookupError& e) {
    EXPECT_EQ(e.name(), "no-such");
    EXPECT_EQ(e.valid_names().size(), 12u);
    EXPECT_NE(std::string(e.what()).find("limited/baseline/no-opp"), std::string::npos);
  }
  EXPECT_THROW(parse_regime("medium"), LookupError);
  EXPECT_THROW(parse_table_id("table6"), LookupError);
}

TEST(Catalog, KappaSwitchToggle) {
  PresetCatalog c = catalog();
  c.set_moonshot_kappa_switch(true);
  const ModelParams m = c.build_preset("limited/moonshot/no-opp");
  ASSERT_TRUE(m.kappa_switch.has_value());
  EXPECT_DOUBLE_EQ(m.kappa_switch->time, 1.0);
  EXPECT_DOUBLE_EQ(m.kappa_at(0.5), 0.4);
  EXPECT_DOUBLE_EQ(m.kappa_at(1.0), 0.6);
  EXPECT_FALSE(c.build_preset("limited/baseline/no-opp").kappa_switch.has_value());
  EXPECT_NEAR(cumulative_risk(m), frozen::kRLimitedMoonshot, 1e-5);
}

TEST(Catalog, MalformedJsonIsValidationError) {
  EXPECT_THROW(PresetCatalog::from_json_text("{"), ValidationError);
  EXPECT_THROW(PresetCatalog::from_json_text(R"({"baseline": {}})"), ValidationError);
  EXPECT_THROW(PresetCatalog::from_file("/nonexistent/presets.json"), ValidationError);
}

TEST(Catalog, EnvironmentOverride) {
  const auto path = std::filesystem::temp_directory_path() / "techrace_presets_test.json";
  {
    std::ifstream in(TECHRACE_SOURCE_DIR "/data/presets.json");
    std::string text((std::istreambuf_iterator<char>(in)), {});
    const auto at = text.find("\"lambda0\": 0.05");
    ASSERT_NE(at, std::string::npos);
    text.replace(at, 15, "\"lambda0\": 0.10");
    std::ofstream(path) << text;
  }
  ::setenv("TECHRACE_PRESETS", path.c_str(), 1);
  const PresetCatalog c = PresetCatalog::load_default();
  ::unsetenv("TECHRACE_PRESETS");
  std::filesystem::remove(path);
  EXPECT_DOUBLE_EQ(c.build_preset("limited/baseline/no-opp").lambda0, 0.10);
  EXPECT_NEAR(cumulative_risk(c.build_preset("limited/baseline/no-opp")),
              2.0 * frozen::kRLimitedBaseline, 1e-8);
}

TEST(RunScenario, DeltasAgainstPetBaseline) {
  const auto& c = catalog();
  const RiskSummary s = run_scenario(c, c.spec("disruptive/moonshot/no-opp"));
  EXPECT_NEAR(s.r10, frozen::kRDisruptiveMoonshot, 1e-8);
  EXPECT_NEAR(s.r_pet_baseline, frozen::kRDisruptiveBaseline, 1e-8);
  EXPECT_NEAR(s.delta_r_pct,
              100.0 * (frozen::kRDisruptiveMoonshot / frozen::kRDisruptiveBaseline - 1.0),
              1e-6);
  EXPECT_NEAR(s.epsilon_r,
              frozen::kRDisruptiveMoonshot / frozen::kRDisruptiveBaseline - 1.0, 1e-8);
  EXPECT_NEAR(s.p10, breakout_prob(s.r10), 1e-15);
}

TEST(RunScenario, OverridesReachBaselines) {
  const auto& c = catalog();
  ScenarioSpec spec = c.spec("limited/baseline/opp");
  spec.overrides["lambda0"] = 0.10;
  const RiskSummary s = run_scenario(c, spec);
  EXPECT_NEAR(s.r10, 2.0 * frozen::kRLimitedBaselineOpp, 1e-8);
  EXPECT_NEAR(s.r_pet_baseline, 2.0 * frozen::kRLimitedBaseline, 1e-8);

  spec.overrides["gamma"] = 1.0;
  EXPECT_THROW(run_scenario(c, spec), LookupError);
}

TEST(RunScenario, HorizonOverride) {
  const auto& c = catalog();
  const RiskSummary s5 = run_scenario(c, c.spec("limited/baseline/no-opp"), 5.0);
  EXPECT_DOUBLE_EQ(s5.horizon, 5.0);
  EXPECT_LT(s5.r10, frozen::kRLimitedBaseline);
  EXPECT_THROW(run_scenario(c, c.spec("limited/baseline/no-opp"), -1.0), ValidationError);
}

TEST(Tables, RowOrder) {
  const auto t5 = make_table(catalog(), TableId::table5);
  const auto t4 = make_table(catalog(), TableId::table4);
  ASSERT_EQ(t5.rows.size(), 12u);
  ASSERT_EQ(t4.rows.size(), 12u);
  EXPECT_EQ(t5.rows[1].scenario, "limited/baseline/opp");
  EXPECT_EQ(t4.rows[1].scenario, "limited/moonshot/no-opp");
  EXPECT_EQ(t5.rows[4].scenario, "disruptive/baseline/no-opp");
  EXPECT_DOUBLE_EQ(t5.rows[4].epsilon_r, 0.0);
}

TEST(Tables, SharedRiskValues) {
  const auto t5 = make_table(catalog(), TableId::table5);
  const auto t4 = make_table(catalog(), TableId::table4);
  for (const auto& a : t5.rows) {
    const auto it = std::find_if(t4.rows.begin(), t4.rows.end(),
                                 [&](const RiskSummary& b) { return b.scenario == a.scenario; });
    ASSERT_NE(it, t4.rows.end());
    EXPECT_EQ(it->r10, a.r10) << a.scenario;
    EXPECT_EQ(it->p10, a.p10) << a.scenario;
    EXPECT_EQ(run_scenario(catalog(), catalog().spec(a.scenario)).r10, a.r10);
  }
}

TEST(Tables, CatalogOrderingRelations) {
  const auto t = make_table(catalog(), TableId::table5);
  auto r = [&](PetRegime g, DetPackage d, bool opp) {
    const auto name = preset_name(g, d, opp);
    for (const auto& row : t.rows) {
      if (row.scenario == name) return row.r10;
    }
    return -1.0;
  };
  for (DetPackage d : {DetPackage::baseline, DetPackage::moonshot}) {
    for (bool opp : {false, true}) {
      EXPECT_LT(r(PetRegime::limited, d, opp), r(PetRegime::disruptive, d, opp));
      EXPECT_LT(r(PetRegime::disruptive, d, opp), r(PetRegime::transformative, d, opp));
    }
  }
  for (PetRegime g : all_regimes()) {
    for (bool opp : {false, true}) {
      EXPECT_LT(r(g, DetPackage::moonshot, opp), r(g, DetPackage::baseline, opp));
    }
    for (DetPackage d : {DetPackage::baseline, DetPackage::moonshot}) {
      EXPECT_GE(r(g, d, true), r(g, d, false));
    }
  }
}

TEST(Walkthrough, SixSteps) {
  const Walkthrough w = walkthrough(catalog());
  ASSERT_EQ(w.steps.size(), 6u);
  ASSERT_TRUE(w.t_star.has_value());
  EXPECT_NEAR(*w.t_star, frozen::kTStarLimited, 1e-12);
  EXPECT_FALSE(w.t_star_moonshot.has_value());
  EXPECT_NEAR(w.r_base, frozen::kRLimitedBaseline, 1e-8);
  EXPECT_NEAR(w.r_moonshot, frozen::kRLimitedMoonshot, 1e-8);
  EXPECT_NEAR(w.delta_r_pct, -98.1, 0.1);
  EXPECT_EQ(w.steps[0].values.back().first, "P(T)");
  EXPECT_NEAR(w.steps[0].values.back().second, frozen::kPetLimitedAt10, 1e-9);
}

}  // namespace
}  // namespace techrace
