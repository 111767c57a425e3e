#include "techrace/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "techrace/error.hpp"
#include "techrace/parallel.hpp"
#include "techrace_presets_embedded.hpp"

namespace techrace {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 3> kRegimeNames = {
    "limited", "disruptive", "transformative"};
constexpr std::array<std::string_view, 2> kPackageNames = {"baseline",
                                                           "moonshot"};

std::vector<std::string> to_strings(auto const& names) {
  return {names.begin(), names.end()};
}

double number_at(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ValidationError(where + "." + key, "missing or not a number");
  }
  return obj.at(key).get<double>();
}

std::vector<DetStep> parse_steps(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ValidationError(where, "must be an array");
  std::vector<DetStep> steps;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    steps.push_back({number_at(arr[i], "t", at), number_at(arr[i], "delta", at)});
  }
  return steps;
}

}  // namespace

std::string_view to_string(PetRegime regime) {
  return kRegimeNames[static_cast<std::size_t>(regime)];
}

std::string_view to_string(DetPackage package) {
  return kPackageNames[static_cast<std::size_t>(package)];
}

PetRegime parse_regime(std::string_view text) {
  for (std::size_t i = 0; i < kRegimeNames.size(); ++i) {
    if (kRegimeNames[i] == text) return static_cast<PetRegime>(i);
  }
  throw LookupError("PET regime", std::string(text), to_strings(kRegimeNames));
}

DetPackage parse_det_package(std::string_view text) {
  for (std::size_t i = 0; i < kPackageNames.size(); ++i) {
    if (kPackageNames[i] == text) return static_cast<DetPackage>(i);
  }
  throw LookupError("DET package", std::string(text), to_strings(kPackageNames));
}

const std::vector<PetRegime>& all_regimes() {
  static const std::vector<PetRegime> regimes = {
      PetRegime::limited, PetRegime::disruptive, PetRegime::transformative};
  return regimes;
}

std::string preset_name(PetRegime regime, DetPackage det, bool opportunistic) {
  std::string name(to_string(regime));
  name += '/';
  name += to_string(det);
  name += opportunistic ? "/opp" : "/no-opp";
  return name;
}

// --- catalog -------------------------------------------------------------

struct CatalogParser {
  static PresetCatalog parse(const nlohmann::json& doc);
};

const PresetCatalog& PresetCatalog::builtin() {
  static const PresetCatalog catalog = from_json_text(kEmbeddedPresets);
  return catalog;
}

PresetCatalog PresetCatalog::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("preset_file", "cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

PresetCatalog PresetCatalog::load_default() {
  if (const char* path = std::getenv("TECHRACE_PRESETS"); path && *path) {
    return from_file(path);
  }
  return builtin();
}

PresetCatalog PresetCatalog::from_json_text(std::string_view text) {
  try {
    return CatalogParser::parse(json::parse(text));
  } catch (const json::exception& e) {
    throw ValidationError("preset_file", e.what());
  }
}

PresetCatalog CatalogParser::parse(const nlohmann::json& doc) {
  PresetCatalog c;
  const json& base = doc.at("baseline");
  c.baseline_.p0 = number_at(base, "p0", "baseline");
  c.baseline_.det.d0 = number_at(base, "d0", "baseline");
  c.baseline_.p_max = number_at(base, "p_max", "baseline");
  c.baseline_.theta = number_at(base, "theta", "baseline");
  c.baseline_.pi0 = number_at(base, "pi0", "baseline");
  c.baseline_.lambda0 = number_at(base, "lambda0", "baseline");
  c.baseline_.beta = number_at(base, "beta", "baseline");
  c.baseline_.tau = number_at(base, "tau", "baseline");
  c.baseline_.horizon = number_at(base, "horizon", "baseline");

  for (const auto& r : doc.at("regimes")) {
    RegimeInfo info;
    info.id = parse_regime(r.at("id").get<std::string>());
    info.display = r.at("display").get<std::string>();
    info.g_p = number_at(r, "g_p", "regimes");
    info.g_p_table2 = r.value("g_p_table2", info.g_p);
    info.doubling_months = r.value("doubling_months", 0.0);
    c.regimes_.push_back(std::move(info));
  }
  for (const auto& p : doc.at("det_packages")) {
    DetPackageInfo info;
    info.id = parse_det_package(p.at("id").get<std::string>());
    info.kappa = number_at(p, "kappa", "det_packages");
    info.steps = parse_steps(p.at("steps"), "det_packages.steps");
    c.packages_.push_back(std::move(info));
  }
  for (const auto& o : doc.at("opportunism")) {
    const auto id = o.at("id").get<std::string>();
    const double eta = number_at(o, "eta", "opportunism");
    if (id == "opp") {
      c.eta_opportunistic_ = eta;
    } else if (id == "no-opp") {
      c.eta_none_ = eta;
    } else {
      throw LookupError("opportunism setting", id, {"no-opp", "opp"});
    }
  }
  c.kappa_switch_ = doc.value("moonshot_kappa_switch", false);
  c.reference_ = doc.value("reference_scenario", "disruptive/baseline/no-opp");

  for (PetRegime r : all_regimes()) (void)c.regime(r);
  (void)c.package(DetPackage::baseline);
  (void)c.package(DetPackage::moonshot);
  (void)c.spec(c.reference_);
  for (const auto& name : c.names()) validate(c.build_preset(name));
  return c;
}

std::vector<std::string> PresetCatalog::names() const {
  std::vector<std::string> out;
  for (PetRegime r : all_regimes()) {
    for (DetPackage d : {DetPackage::baseline, DetPackage::moonshot}) {
      for (bool opp : {false, true}) out.push_back(preset_name(r, d, opp));
    }
  }
  return out;
}

ScenarioSpec PresetCatalog::spec(PetRegime regime, DetPackage det,
                                 bool opportunistic) const {
  return {preset_name(regime, det, opportunistic), regime, det, opportunistic,
          {}};
}

ScenarioSpec PresetCatalog::spec(std::string_view name) const {
  for (PetRegime r : all_regimes()) {
    for (DetPackage d : {DetPackage::baseline, DetPackage::moonshot}) {
      for (bool opp : {false, true}) {
        if (preset_name(r, d, opp) == name) return spec(r, d, opp);
      }
    }
  }
  throw LookupError("preset", std::string(name), names());
}

const RegimeInfo& PresetCatalog::regime(PetRegime id) const {
  auto it = std::find_if(regimes_.begin(), regimes_.end(),
                         [id](const RegimeInfo& r) { return r.id == id; });
  if (it == regimes_.end()) {
    throw LookupError("PET regime", std::string(to_string(id)),
                      to_strings(kRegimeNames));
  }
  return *it;
}

const DetPackageInfo& PresetCatalog::package(DetPackage id) const {
  auto it = std::find_if(packages_.begin(), packages_.end(),
                         [id](const DetPackageInfo& p) { return p.id == id; });
  if (it == packages_.end()) {
    throw LookupError("DET package", std::string(to_string(id)),
                      to_strings(kPackageNames));
  }
  return *it;
}

ModelParams PresetCatalog::build(const ScenarioSpec& spec) const {
  ModelParams p = baseline_;
  p.g_p = regime(spec.regime).g_p;
  const auto& pkg = package(spec.det);
  p.kappa = pkg.kappa;
  p.det.steps = pkg.steps;
  p.eta = eta(spec.opportunistic);
  if (kappa_switch_ && spec.det == DetPackage::moonshot && !pkg.steps.empty()) {
    p.kappa_switch =
        KappaSwitch{pkg.steps.front().time, package(DetPackage::baseline).kappa};
  }
  for (const auto& [name, value] : spec.overrides) set_param(p, name, value);
  validate(p);
  return p;
}

std::string PresetCatalog::display_name(const ScenarioSpec& spec) const {
  std::string name = regime(spec.regime).display;
  const bool moonshot = spec.det == DetPackage::moonshot;
  if (moonshot && spec.opportunistic) {
    name += " + Both";
  } else if (moonshot) {
    name += " + Moonshot";
  } else if (spec.opportunistic) {
    name += " + Opportunistic";
  }
  return name;
}

ModelParams build_preset(std::string_view name) {
  return PresetCatalog::builtin().build_preset(name);
}

// --- scenario execution --------------------------------------------------

namespace {

double percent_change(double value, double reference) {
  return reference == 0.0 ? 0.0 : 100.0 * (value - reference) / reference;
}

RiskSummary summarize(const PresetCatalog& catalog, const ScenarioSpec& spec,
                      double horizon, double r, double r_pet, double r_ref) {
  RiskSummary s;
  s.scenario = spec.name;
  s.display_name = catalog.display_name(spec);
  s.horizon = horizon;
  s.r10 = r;
  s.p10 = breakout_prob(r);
  s.r_pet_baseline = r_pet;
  s.r_reference = r_ref;
  s.delta_r_pct = percent_change(r, r_pet);
  s.delta_p_pct = percent_change(s.p10, breakout_prob(r_pet));
  s.epsilon_r = r_ref == 0.0 ? 0.0 : (r - r_ref) / r_ref;
  return s;
}

ScenarioSpec with_overrides(ScenarioSpec base, const ScenarioSpec& from) {
  base.overrides = from.overrides;
  return base;
}

ModelParams build_at(const PresetCatalog& catalog, const ScenarioSpec& spec,
                     std::optional<double> horizon) {
  ModelParams p = catalog.build(spec);
  if (horizon) {
    p.horizon = *horizon;
    validate(p);
  }
  return p;
}

}  // namespace

RiskSummary run_scenario(const PresetCatalog& catalog, const ScenarioSpec& spec,
                         std::optional<double> horizon) {
  const ScenarioSpec pet_base = with_overrides(
      catalog.spec(spec.regime, DetPackage::baseline, false), spec);
  const ScenarioSpec reference =
      with_overrides(catalog.spec(catalog.reference_name()), spec);

  const ModelParams params = build_at(catalog, spec, horizon);
  std::array<double, 3> r{};
  const std::array<ModelParams, 3> runs = {
      params, build_at(catalog, pet_base, horizon),
      build_at(catalog, reference, horizon)};
  parallel_for(runs.size(), [&](std::size_t i) { r[i] = cumulative_risk(runs[i]); });
  return summarize(catalog, spec, params.horizon, r[0], r[1], r[2]);
}

TableId parse_table_id(std::string_view text) {
  if (text == "table4") return TableId::table4;
  if (text == "table5") return TableId::table5;
  throw LookupError("table", std::string(text), {"table4", "table5"});
}

std::string_view to_string(TableId id) {
  return id == TableId::table4 ? "table4" : "table5";
}

ScenarioTable make_table(const PresetCatalog& catalog, TableId id,
                         std::optional<double> horizon) {
  struct Variant {
    DetPackage det;
    bool opp;
  };
  const std::array<Variant, 4> table5_order = {
      Variant{DetPackage::baseline, false}, Variant{DetPackage::baseline, true},
      Variant{DetPackage::moonshot, false}, Variant{DetPackage::moonshot, true}};
  const std::array<Variant, 4> table4_order = {
      Variant{DetPackage::baseline, false}, Variant{DetPackage::moonshot, false},
      Variant{DetPackage::baseline, true}, Variant{DetPackage::moonshot, true}};
  const auto& order = id == TableId::table4 ? table4_order : table5_order;

  std::vector<ScenarioSpec> specs;
  for (PetRegime r : all_regimes()) {
    for (const auto& v : order) specs.push_back(catalog.spec(r, v.det, v.opp));
  }

  std::vector<double> risk(specs.size());
  double horizon_used = 0.0;
  parallel_for(specs.size(), [&](std::size_t i) {
    risk[i] = cumulative_risk(build_at(catalog, specs[i], horizon));
  });
  horizon_used = build_at(catalog, specs.front(), horizon).horizon;

  auto risk_of = [&](const std::string& name) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (specs[i].name == name) return risk[i];
    }
    throw LookupError("preset", name, catalog.names());
  };
  const double r_ref = risk_of(catalog.reference_name());

  ScenarioTable table;
  table.id = id;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const double r_pet =
        risk_of(preset_name(specs[i].regime, DetPackage::baseline, false));
    table.rows.push_back(
        summarize(catalog, specs[i], horizon_used, risk[i], r_pet, r_ref));
  }
  return table;
}

Walkthrough walkthrough(const PresetCatalog& catalog) {
  const ModelParams base = catalog.build_preset(
      preset_name(PetRegime::limited, DetPackage::baseline, false));
  const ModelParams moon = catalog.build_preset(
      preset_name(PetRegime::limited, DetPackage::moonshot, false));

  Walkthrough w;
  w.t_star = crossing_times(base).first_persistent;
  w.t_star_moonshot = crossing_times(moon).first_persistent;
  w.r_base = cumulative_risk(base);
  w.p_base = breakout_prob(w.r_base);
  w.r_moonshot = cumulative_risk(moon);
  w.p_moonshot = breakout_prob(w.r_moonshot);
  w.delta_r_pct = percent_change(w.r_moonshot, w.r_base);

  const double T = base.horizon;
  w.steps.push_back({1,
                     "PET path",
                     {{"g_p", base.g_p},
                      {"P0", base.p0},
                      {"P_max", base.p_max},
                      {"P_max/P0 - 1", base.p_max / base.p0 - 1.0},
                      {"P(T)", pet_capability(T, base)}},
                     "P(t) = P_max / (1 + (P_max/P0 - 1) e^{-g_p t})"});

  WalkthroughStep det{2, "DET path", {{"D(0)", base.det.value_at(0.0)}}, ""};
  for (const auto& s : base.det.steps) {
    det.values.push_back({fmt::format("D({:g})", s.time),
                          base.det.value_at(s.time)});
  }
  det.note = "right-continuous steps";
  w.steps.push_back(std::move(det));

  WalkthroughStep rai{3, "RAI trajectory", {}, ""};
  if (w.t_star) {
    rai.values.push_back({"t*", *w.t_star});
    rai.note = "detectors ahead until t*, RAI >= 0 afterwards";
  } else {
    rai.note = "RAI stays negative through the horizon";
  }
  rai.values.push_back({"RAI(T)", relative_advantage(T, base)});
  w.steps.push_back(std::move(rai));

  w.steps.push_back({4,
                     "Risk integral without moonshot",
                     {{"R(T)", w.r_base}, {"P(T)", w.p_base}},
                     fmt::format("eta = {:g}, pi0 = {:g}", base.eta, base.pi0)});

  WalkthroughStep ms{5, "Inject DET moonshot", {{"kappa", moon.kappa}}, ""};
  for (const auto& s : moon.det.steps) {
    ms.values.push_back({fmt::format("D({:g})", s.time),
                         moon.det.value_at(s.time)});
  }
  if (w.t_star_moonshot) {
    ms.values.push_back({"t*", *w.t_star_moonshot});
  } else {
    ms.note = "t* -> infinity: RAI stays negative, detectors ahead all decade";
  }
  w.steps.push_back(std::move(ms));

  w.steps.push_back({6,
                     "Risk with DET moonshot",
                     {{"R(T)", w.r_moonshot},
                      {"P(T)", w.p_moonshot},
                      {"Delta R (%)", w.delta_r_pct}},
                     ""});
  return w;
}

}  // namespace techrace
