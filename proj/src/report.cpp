#include "techrace/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "techrace/error.hpp"

namespace techrace {
namespace {

constexpr std::array<const char*, 11> kScalarFields = {
    "p0", "g_p", "p_max", "kappa", "theta", "pi0",
    "lambda0", "eta", "beta", "tau", "horizon"};

Json number_or_null(double x) {
  return std::isfinite(x) ? Json(x) : Json(nullptr);
}

Json optional_number(const std::optional<double>& x) {
  return x ? number_or_null(*x) : Json(nullptr);
}

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

bool is_pet_baseline(const RiskSummary& s) {
  constexpr std::string_view suffix = "/baseline/no-opp";
  return s.scenario.size() >= suffix.size() &&
         s.scenario.compare(s.scenario.size() - suffix.size(), suffix.size(),
                            suffix) == 0;
}

void push_envelope_header(std::vector<std::string>& header,
                          std::string_view name) {
  for (const char* part : {"lower", "nominal", "upper"}) {
    header.push_back(fmt::format("{}_{}", name, part));
  }
}

Json envelope_json(const Envelope& env) {
  return {{"lower", env.lower}, {"nominal", env.nominal}, {"upper", env.upper}};
}

void read_number(const Json& body, std::string_view field, double& target,
                 std::vector<FieldIssue>& issues) {
  const auto it = body.find(field);
  if (it == body.end()) {
    issues.push_back({std::string(field), "missing"});
  } else if (!it->is_number()) {
    issues.push_back({std::string(field), "must be a number"});
  } else {
    target = it->get<double>();
  }
}

}  // namespace

Json params_to_json(const ModelParams& params) {
  Json j = {{"p0", params.p0},         {"d0", params.det.d0},
            {"g_p", params.g_p},       {"p_max", params.p_max},
            {"kappa", params.kappa},   {"theta", params.theta},
            {"pi0", params.pi0},       {"lambda0", params.lambda0},
            {"eta", params.eta},       {"beta", params.beta},
            {"tau", params.tau},       {"horizon", params.horizon}};
  Json steps = Json::array();
  for (const auto& s : params.det.steps) {
    steps.push_back({{"t", s.time}, {"delta", s.delta}});
  }
  j["det_steps"] = std::move(steps);
  if (params.kappa_switch) {
    j["kappa_switch"] = {{"t", params.kappa_switch->time},
                         {"initial_kappa", params.kappa_switch->initial_kappa}};
  }
  return j;
}

ModelParams params_from_json(const Json& body) {
  if (!body.is_object()) {
    throw ValidationError("params", "must be a JSON object");
  }
  ModelParams p;
  std::vector<FieldIssue> issues;
  read_number(body, "d0", p.det.d0, issues);
  for (const char* field : kScalarFields) {
    double value = 0.0;
    const std::size_t before = issues.size();
    read_number(body, field, value, issues);
    if (issues.size() == before) set_param(p, field, value);
  }

  p.det.steps.clear();
  const auto steps = body.find("det_steps");
  if (steps == body.end()) {
    issues.push_back({"det_steps", "missing"});
  } else if (!steps->is_array()) {
    issues.push_back({"det_steps", "must be an array of {t, delta}"});
  } else {
    for (std::size_t i = 0; i < steps->size(); ++i) {
      const Json& s = (*steps)[i];
      const std::string prefix = fmt::format("det_steps[{}]", i);
      if (!s.is_object()) {
        issues.push_back({prefix, "must be an object {t, delta}"});
        continue;
      }
      DetStep step;
      const std::size_t before = issues.size();
      read_number(s, "t", step.time, issues);
      read_number(s, "delta", step.delta, issues);
      for (std::size_t k = before; k < issues.size(); ++k) {
        issues[k].field = prefix + "." + issues[k].field;
      }
      if (issues.size() == before) p.det.steps.push_back(step);
    }
  }

  p.kappa_switch.reset();
  if (const auto ks = body.find("kappa_switch");
      ks != body.end() && !ks->is_null()) {
    KappaSwitch sw;
    const std::size_t before = issues.size();
    if (!ks->is_object()) {
      issues.push_back({"kappa_switch", "must be an object {t, initial_kappa}"});
    } else {
      read_number(*ks, "t", sw.time, issues);
      read_number(*ks, "initial_kappa", sw.initial_kappa, issues);
      for (std::size_t k = before; k < issues.size(); ++k) {
        issues[k].field = "kappa_switch." + issues[k].field;
      }
    }
    if (issues.size() == before) p.kappa_switch = sw;
  }

  if (!issues.empty()) throw ValidationError(std::move(issues));
  validate(p);
  return p;
}

Json to_json(const RiskSummary& s) {
  return {{"scenario", s.scenario},
          {"display_name", s.display_name},
          {"horizon", s.horizon},
          {"r", s.r10},
          {"p", s.p10},
          {"delta_r_pct", s.delta_r_pct},
          {"delta_p_pct", s.delta_p_pct},
          {"epsilon_r", s.epsilon_r},
          {"r_pet_baseline", s.r_pet_baseline},
          {"r_reference", s.r_reference}};
}

Json to_json(const ScenarioTable& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) rows.push_back(to_json(row));
  return {{"id", std::string(to_string(table.id))}, {"rows", std::move(rows)}};
}

Json to_json(const SweepSurface& surface) {
  std::vector<std::string> regimes;
  for (PetRegime r : surface.regimes) regimes.emplace_back(to_string(r));
  Json r10 = Json::array();
  for (std::size_t i = 0; i < surface.values.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < surface.regimes.size(); ++j) {
      row.push_back(surface.at(i, j));
    }
    r10.push_back(std::move(row));
  }
  return {{"parameter", std::string(to_string(surface.parameter))},
          {"values", surface.values},
          {"regimes", regimes},
          {"r10", std::move(r10)},
          {"warnings", surface.warnings}};
}

Json to_json(const Trajectory& tr) {
  return {{"t", tr.t},
          {"p", tr.p},
          {"d", tr.d},
          {"rai", tr.rai},
          {"pr_detect", tr.pr_detect},
          {"hazard", tr.hazard},
          {"integrand", tr.integrand},
          {"cumulative_r", tr.cumulative_risk}};
}

Json to_json(const UncertaintyBand& band) {
  return {{"t", band.t},
          {"p", envelope_json(band.p)},
          {"d", envelope_json(band.d)},
          {"rai", envelope_json(band.rai)},
          {"r", envelope_json(band.r)},
          {"members", band.members},
          {"skipped", band.skipped}};
}

Json to_json(const MCResult& r) {
  return {{"trials", r.trials},
          {"seed", r.seed},
          {"max_rate", r.max_rate},
          {"attempts", r.attempts},
          {"undetected", r.undetected},
          {"trials_with_undetected", r.trials_with_undetected},
          {"mean_undetected",
           {{"value", r.mean_undetected.value},
            {"ci99_half_width", number_or_null(r.mean_undetected.ci99_half_width)}}},
          {"p_at_least_one",
           {{"value", r.p_at_least_one.value},
            {"ci99_half_width", number_or_null(r.p_at_least_one.ci99_half_width)}}}};
}

Json to_json(const ValidationReport& v) {
  return {{"scenario", v.scenario},
          {"analytic_r", v.analytic_r},
          {"analytic_p", v.analytic_p},
          {"mc", to_json(v.mc)},
          {"r_inside", v.r_inside},
          {"p_inside", v.p_inside},
          {"inconclusive", v.inconclusive},
          {"pass", v.pass}};
}

Json to_json(const Walkthrough& w) {
  Json steps = Json::array();
  for (const auto& s : w.steps) {
    Json values = Json::object();
    for (const auto& [k, v] : s.values) values[k] = number_or_null(v);
    steps.push_back({{"step", s.number},
                     {"title", s.title},
                     {"values", std::move(values)},
                     {"note", s.note}});
  }
  return {{"steps", std::move(steps)},
          {"t_star", optional_number(w.t_star)},
          {"t_star_moonshot", optional_number(w.t_star_moonshot)},
          {"r_base", w.r_base},
          {"p_base", w.p_base},
          {"r_moonshot", w.r_moonshot},
          {"p_moonshot", w.p_moonshot},
          {"delta_r_pct", w.delta_r_pct}};
}

std::string format_number(double value, int precision) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::string s = fmt::format("{:.{}f}", value, std::max(0, precision));
  if (s.front() == '-' &&
      s.find_first_not_of("-0.") == std::string::npos) {
    s.erase(0, 1);
  }
  return s;
}

void write_csv(std::ostream& os, const TextTable& table) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << (i ? "," : "") << csv_escape(cells[i]);
    }
    os << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

void write_text(std::ostream& os, const TextTable& table) {
  std::vector<std::size_t> width(table.header.size(), 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], cells[i].size());
    }
  };
  measure(table.header);
  for (const auto& row : table.rows) measure(row);

  auto line = [&](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      // First column left-aligned, numbers right-aligned.
      out += i == 0 ? fmt::format("{:<{}}", cells[i], width[i])
                    : fmt::format("  {:>{}}", cells[i], width[i]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    os << out << '\n';
  };
  line(table.header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  os << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
  for (const auto& row : table.rows) line(row);
}

TextTable tabulate(const RiskSummary& s, int precision) {
  const auto n = [&](double x) { return format_number(x, precision); };
  return {{"scenario", "display_name", "horizon", "r", "p", "delta_r_pct",
           "delta_p_pct", "epsilon_r"},
          {{s.scenario, s.display_name, format_number(s.horizon, 1), n(s.r10),
            n(s.p10), n(s.delta_r_pct), n(s.delta_p_pct), n(s.epsilon_r)}}};
}

TextTable tabulate(const ScenarioTable& table, int precision) {
  const auto n = [&](double x) { return format_number(x, precision); };
  TextTable out;
  if (table.id == TableId::table4) {
    out.header = {"scenario", "display_name", "r10", "p10", "delta_r_pct",
                  "delta_p_pct"};
    for (const auto& s : table.rows) {
      const bool base = is_pet_baseline(s);
      out.rows.push_back({s.scenario, s.display_name, n(s.r10), n(s.p10),
                          base ? "" : format_number(s.delta_r_pct, 0),
                          base ? "" : format_number(s.delta_p_pct, 0)});
    }
  } else {
    out.header = {"scenario", "display_name", "r10", "p10", "epsilon_r"};
    for (const auto& s : table.rows) {
      out.rows.push_back(
          {s.scenario, s.display_name, n(s.r10), n(s.p10), n(s.epsilon_r)});
    }
  }
  return out;
}

TextTable tabulate(const SweepSurface& surface, int precision) {
  TextTable out{{"parameter", "value", "regime", "r10"}, {}};
  for (std::size_t i = 0; i < surface.values.size(); ++i) {
    for (std::size_t j = 0; j < surface.regimes.size(); ++j) {
      out.rows.push_back({std::string(to_string(surface.parameter)),
                          fmt::format("{:g}", surface.values[i]),
                          std::string(to_string(surface.regimes[j])),
                          format_number(surface.at(i, j), precision)});
    }
  }
  return out;
}

TextTable tabulate(const Trajectory& tr, int precision) {
  TextTable out{{"t", "p", "d", "rai", "pr_detect", "hazard", "integrand",
                 "cumulative_r"},
                {}};
  for (std::size_t i = 0; i < tr.size(); ++i) {
    out.rows.push_back(
        {format_number(tr.t[i], precision), format_number(tr.p[i], precision),
         format_number(tr.d[i], precision), format_number(tr.rai[i], precision),
         format_number(tr.pr_detect[i], precision),
         format_number(tr.hazard[i], precision),
         format_number(tr.integrand[i], precision),
         format_number(tr.cumulative_risk[i], precision)});
  }
  return out;
}

TextTable tabulate(const UncertaintyBand& band, int precision) {
  TextTable out;
  out.header.push_back("t");
  const std::array<std::pair<std::string_view, const Envelope*>, 4> series = {{
      {"p", &band.p}, {"d", &band.d}, {"rai", &band.rai}, {"r", &band.r}}};
  for (const auto& [name, env] : series) push_envelope_header(out.header, name);
  for (std::size_t i = 0; i < band.t.size(); ++i) {
    std::vector<std::string> row = {format_number(band.t[i], precision)};
    for (const auto& [name, env] : series) {
      row.push_back(format_number(env->lower[i], precision));
      row.push_back(format_number(env->nominal[i], precision));
      row.push_back(format_number(env->upper[i], precision));
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

TextTable tabulate(const std::vector<ValidationReport>& reports, int precision) {
  const auto n = [&](double x) { return format_number(x, precision); };
  TextTable out{{"scenario", "trials", "seed", "analytic_r", "mc_r", "mc_r_ci99",
                 "analytic_p", "mc_p", "mc_p_ci99", "inconclusive", "pass"},
                {}};
  for (const auto& v : reports) {
    out.rows.push_back({v.scenario, std::to_string(v.mc.trials),
                        std::to_string(v.mc.seed), n(v.analytic_r),
                        n(v.mc.mean_undetected.value),
                        n(v.mc.mean_undetected.ci99_half_width), n(v.analytic_p),
                        n(v.mc.p_at_least_one.value),
                        n(v.mc.p_at_least_one.ci99_half_width),
                        v.inconclusive ? "true" : "false",
                        v.pass ? "true" : "false"});
  }
  return out;
}

void write_walkthrough_text(std::ostream& os, const Walkthrough& w,
                            int precision) {
  for (const auto& step : w.steps) {
    os << fmt::format("Step {}: {}\n", step.number, step.title);
    for (const auto& [label, value] : step.values) {
      os << fmt::format("  {:<14} {}\n", label, format_number(value, precision));
    }
    if (!step.note.empty()) os << "  " << step.note << '\n';
  }
}

}  // namespace techrace
