#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "techrace/model.hpp"

namespace techrace {

enum class PetRegime { limited, disruptive, transformative };
enum class DetPackage { baseline, moonshot };

std::string_view to_string(PetRegime regime);
std::string_view to_string(DetPackage package);
PetRegime parse_regime(std::string_view text);
DetPackage parse_det_package(std::string_view text);
const std::vector<PetRegime>& all_regimes();

// Preset names follow "<regime>/<det>/<opp>", e.g. "limited/moonshot/no-opp".
struct ScenarioSpec {
  std::string name;
  PetRegime regime = PetRegime::limited;
  DetPackage det = DetPackage::baseline;
  bool opportunistic = false;
  // Scalar substitutions applied after the preset is built (see
  // scalar_param_names()).
  std::map<std::string, double> overrides;
};

struct RegimeInfo {
  PetRegime id = PetRegime::limited;
  std::string display;
  double g_p = 0.0;
  double g_p_table2 = 0.0;
  double doubling_months = 0.0;
};

struct DetPackageInfo {
  DetPackage id = DetPackage::baseline;
  double kappa = 0.0;
  std::vector<DetStep> steps;
};

// The twelve scenario variants, loaded from the shipped preset file.
class PresetCatalog {
 public:
  // Catalog compiled from data/presets.json.
  static const PresetCatalog& builtin();
  static PresetCatalog from_json_text(std::string_view text);
  static PresetCatalog from_file(const std::filesystem::path& path);
  // $TECHRACE_PRESETS if set, otherwise builtin().
  static PresetCatalog load_default();

  std::vector<std::string> names() const;
  ScenarioSpec spec(std::string_view name) const;
  ScenarioSpec spec(PetRegime regime, DetPackage det, bool opportunistic) const;

  ModelParams build(const ScenarioSpec& spec) const;
  ModelParams build_preset(std::string_view name) const {
    return build(spec(name));
  }

  std::string display_name(const ScenarioSpec& spec) const;
  const RegimeInfo& regime(PetRegime id) const;
  const DetPackageInfo& package(DetPackage id) const;
  double eta(bool opportunistic) const {
    return opportunistic ? eta_opportunistic_ : eta_none_;
  }
  const ModelParams& baseline() const noexcept { return baseline_; }
  const std::string& reference_name() const noexcept { return reference_; }

  // When set, moonshot packages use the baseline slope until their first
  // upgrade instead of the steeper slope over the whole horizon.
  bool moonshot_kappa_switch() const noexcept { return kappa_switch_; }
  void set_moonshot_kappa_switch(bool on) noexcept { kappa_switch_ = on; }

 private:
  PresetCatalog() = default;
  friend struct CatalogParser;

  ModelParams baseline_;
  std::vector<RegimeInfo> regimes_;
  std::vector<DetPackageInfo> packages_;
  double eta_none_ = 0.0;
  double eta_opportunistic_ = 3.0;
  bool kappa_switch_ = false;
  std::string reference_;
};

// Shorthand over PresetCatalog::builtin().
ModelParams build_preset(std::string_view name);

std::string preset_name(PetRegime regime, DetPackage det, bool opportunistic);

struct RiskSummary {
  std::string scenario;
  std::string display_name;
  double horizon = 0.0;
  double r10 = 0.0;
  double p10 = 0.0;
  // Versus the same regime with baseline DET and no opportunism.
  double delta_r_pct = 0.0;
  double delta_p_pct = 0.0;
  // (r - r_ref) / r_ref against the reference (Disruptive) baseline.
  double epsilon_r = 0.0;
  double r_pet_baseline = 0.0;
  double r_reference = 0.0;
};

// Baselines are evaluated with the spec's overrides and horizon so that the
// deltas compare like with like.
RiskSummary run_scenario(const PresetCatalog& catalog, const ScenarioSpec& spec,
                         std::optional<double> horizon = std::nullopt);

enum class TableId { table4, table5 };
TableId parse_table_id(std::string_view text);
std::string_view to_string(TableId id);

struct ScenarioTable {
  TableId id = TableId::table5;
  std::vector<RiskSummary> rows;
};

// All twelve variants in the row order of the respective published table.
ScenarioTable make_table(const PresetCatalog& catalog, TableId id,
                         std::optional<double> horizon = std::nullopt);

struct WalkthroughStep {
  int number = 0;
  std::string title;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

struct Walkthrough {
  std::vector<WalkthroughStep> steps;
  std::optional<double> t_star;
  std::optional<double> t_star_moonshot;
  double r_base = 0.0;
  double p_base = 0.0;
  double r_moonshot = 0.0;
  double p_moonshot = 0.0;
  double delta_r_pct = 0.0;
};

// Limited AI baseline to moonshot transition, six steps.
Walkthrough walkthrough(const PresetCatalog& catalog);

}  // namespace techrace
