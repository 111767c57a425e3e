#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "techrace/model.hpp"
#include "techrace/montecarlo.hpp"
#include "techrace/scenario.hpp"
#include "techrace/sensitivity.hpp"

namespace techrace {

using Json = nlohmann::json;

// Flat wire form: p0, d0, g_p, p_max, kappa, theta, pi0, lambda0, eta, beta,
// tau, det_steps [{t, delta}], horizon, optional kappa_switch {t, initial_kappa}.
Json params_to_json(const ModelParams& params);
// Every missing or mistyped field is reported, then model invariants are
// checked. Throws ValidationError.
ModelParams params_from_json(const Json& body);

Json to_json(const RiskSummary& summary);
Json to_json(const ScenarioTable& table);
Json to_json(const SweepSurface& surface);
Json to_json(const Trajectory& trajectory);
Json to_json(const UncertaintyBand& band);
Json to_json(const MCResult& result);
Json to_json(const ValidationReport& report);
Json to_json(const Walkthrough& walkthrough);

// Fixed-point text with "-0.000" folded to "0.000".
std::string format_number(double value, int precision);

// Header plus rows of preformatted cells, rendered as CSV or aligned text.
struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

void write_csv(std::ostream& os, const TextTable& table);
void write_text(std::ostream& os, const TextTable& table);

// CSV schemas:
//   summary      scenario,display_name,horizon,r,p,delta_r_pct,delta_p_pct,epsilon_r
//   table4       scenario,display_name,r10,p10,delta_r_pct,delta_p_pct
//   table5       scenario,display_name,r10,p10,epsilon_r
//   surface      parameter,value,regime,r10
//   trajectory   t,p,d,rai,pr_detect,hazard,integrand,cumulative_r
//   band         t,<series>_lower,<series>_nominal,<series>_upper for p,d,rai,r
//   validation   scenario,trials,seed,analytic_r,mc_r,mc_r_ci99,analytic_p,mc_p,mc_p_ci99,inconclusive,pass
TextTable tabulate(const RiskSummary& summary, int precision);
TextTable tabulate(const ScenarioTable& table, int precision);
TextTable tabulate(const SweepSurface& surface, int precision);
TextTable tabulate(const Trajectory& trajectory, int precision);
TextTable tabulate(const UncertaintyBand& band, int precision);
TextTable tabulate(const std::vector<ValidationReport>& reports, int precision);

void write_walkthrough_text(std::ostream& os, const Walkthrough& walkthrough,
                            int precision);

}  // namespace techrace
