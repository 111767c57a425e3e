#include "techrace/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "techrace/error.hpp"
#include "techrace/montecarlo.hpp"
#include "techrace/report.hpp"
#include "techrace/scenario.hpp"
#include "techrace/sensitivity.hpp"
#include "techrace/service.hpp"

namespace techrace::cli {
namespace {

enum class Format { text, csv, json };

struct Common {
  Format format = Format::text;
  std::string out_path;
  int precision = 3;
  bool kappa_switch = false;
};

struct Options {
  Common common;
  std::string preset;
  std::optional<double> horizon;
  std::string table_id = "table5";
  std::string param = "all";
  std::vector<double> values;
  double resolution = 0.0;
  std::uint64_t trials = 100000;
  std::uint64_t seed = 20250101;
  ServerOptions server;
  bool no_cors = false;
};

void add_output_flags(CLI::App* sub, Common& c, bool with_format = true) {
  if (with_format) {
    const std::map<std::string, Format> formats = {
        {"text", Format::text}, {"csv", Format::csv}, {"json", Format::json}};
    sub->add_option("--format", c.format, "Output format: text, csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  }
  sub->add_option("--out", c.out_path, "Write output to this file instead of stdout");
  sub->add_option("--precision", c.precision, "Decimal places (>= 1)")
      ->check(CLI::Range(1, 17));
}

void add_catalog_flags(CLI::App* sub, Common& c) {
  sub->add_flag("--moonshot-kappa-switch", c.kappa_switch,
                "Moonshot detection slope applies only from its first upgrade");
}

class Sink {
 public:
  Sink(const Common& c, std::ostream& fallback) : common_(c), os_(&fallback) {
    if (!c.out_path.empty()) {
      file_.open(c.out_path);
      if (!file_) throw PreconditionError("cannot open output file " + c.out_path);
      os_ = &file_;
    }
  }

  std::ostream& stream() { return *os_; }

  void emit(const TextTable& table, const Json& json) {
    switch (common_.format) {
      case Format::csv: write_csv(*os_, table); break;
      case Format::json: *os_ << json.dump(2) << '\n'; break;
      case Format::text: write_text(*os_, table); break;
    }
  }

  void finish() {
    os_->flush();
    if (!*os_) throw ComputationFault("write failed");
  }

 private:
  const Common& common_;
  std::ofstream file_;
  std::ostream* os_;
};

PresetCatalog load_catalog(const Common& c) {
  PresetCatalog catalog = PresetCatalog::load_default();
  catalog.set_moonshot_kappa_switch(c.kappa_switch);
  return catalog;
}

ModelParams preset_params(const PresetCatalog& catalog, const Options& o) {
  ModelParams p = catalog.build_preset(o.preset);
  if (o.horizon) {
    p.horizon = *o.horizon;
    validate(p);
  }
  return p;
}

int cmd_run(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  const RiskSummary s = run_scenario(catalog, catalog.spec(o.preset), o.horizon);
  Sink sink(o.common, out);
  if (o.common.format == Format::text) {
    const int n = o.common.precision;
    auto& os = sink.stream();
    os << fmt::format("{} ({})\n", s.scenario, s.display_name);
    os << fmt::format("R({:g})={}, P({:g})={}\n", s.horizon,
                      format_number(s.r10, n), s.horizon, format_number(s.p10, n));
    os << fmt::format("delta R vs PET baseline: {}%\n", format_number(s.delta_r_pct, 1));
    os << fmt::format("delta P vs PET baseline: {}%\n", format_number(s.delta_p_pct, 1));
    os << fmt::format("epsilon_R vs reference: {}\n", format_number(s.epsilon_r, n));
  } else {
    sink.emit(tabulate(s, o.common.precision), to_json(s));
  }
  sink.finish();
  return kExitOk;
}

int cmd_table(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  const ScenarioTable table =
      make_table(catalog, parse_table_id(o.table_id), o.horizon);
  Sink sink(o.common, out);
  sink.emit(tabulate(table, o.common.precision), to_json(table));
  sink.finish();
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const PresetCatalog catalog = load_catalog(o.common);
  std::vector<SweepParameter> params;
  if (o.param == "all") {
    if (!o.values.empty()) {
      throw PreconditionError("--values requires a single --param");
    }
    params = all_sweep_parameters();
  } else {
    params.push_back(parse_sweep_parameter(o.param));
  }

  TextTable combined;
  Json surfaces = Json::array();
  for (SweepParameter sp : params) {
    SweepGrid grid = default_sweep(sp, catalog);
    if (!o.values.empty()) grid.values = o.values;
    if (o.horizon) grid.base.horizon = *o.horizon;
    const SweepSurface surface = oat_sweep(grid, catalog);
    for (const auto& w : surface.warnings) err << "warning: " << w << '\n';
    TextTable t = tabulate(surface, o.common.precision);
    combined.header = t.header;
    for (auto& row : t.rows) combined.rows.push_back(std::move(row));
    surfaces.push_back(to_json(surface));
  }
  Sink sink(o.common, out);
  sink.emit(combined, surfaces.size() == 1 ? surfaces[0] : surfaces);
  sink.finish();
  return kExitOk;
}

int cmd_walkthrough(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  const Walkthrough w = walkthrough(catalog);
  Sink sink(o.common, out);
  if (o.common.format == Format::text) {
    write_walkthrough_text(sink.stream(), w, o.common.precision);
  } else {
    TextTable t{{"step", "title", "label", "value"}, {}};
    for (const auto& step : w.steps) {
      for (const auto& [label, value] : step.values) {
        t.rows.push_back({std::to_string(step.number), step.title, label,
                          format_number(value, o.common.precision)});
      }
    }
    sink.emit(t, to_json(w));
  }
  sink.finish();
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  std::vector<std::string> names =
      o.preset.empty() ? catalog.names() : std::vector<std::string>{o.preset};
  std::vector<ValidationReport> reports;
  for (const auto& name : names) {
    ScenarioSpec spec = catalog.spec(name);
    ModelParams p = catalog.build(spec);
    if (o.horizon) {
      p.horizon = *o.horizon;
      validate(p);
    }
    reports.push_back(techrace::validate(p, o.trials, o.seed, name));
  }
  Sink sink(o.common, out);
  Json list = Json::array();
  for (const auto& r : reports) list.push_back(to_json(r));
  sink.emit(tabulate(reports, o.common.precision), list);
  sink.finish();
  for (const auto& r : reports) {
    if (!r.pass || r.inconclusive) return kExitValidationFailed;
  }
  return kExitOk;
}

int cmd_trajectory(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  const ModelParams p = preset_params(catalog, o);
  const double resolution = o.resolution > 0 ? o.resolution : kDefaultResolution;
  if (resolution > kMaxResolution) {
    throw PreconditionError(fmt::format("--resolution exceeds {:g}", kMaxResolution));
  }
  const Trajectory tr = sample_trajectory(p, resolution);
  Sink sink(o.common, out);
  sink.emit(tabulate(tr, o.common.precision), to_json(tr));
  sink.finish();
  return kExitOk;
}

int cmd_band(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  const ModelParams p = preset_params(catalog, o);
  BandSpec spec = BandSpec::defaults();
  if (o.resolution > 0) spec.resolution = o.resolution;
  if (spec.resolution > kMaxResolution) {
    throw PreconditionError(fmt::format("--resolution exceeds {:g}", kMaxResolution));
  }
  const UncertaintyBand band = uncertainty_band(p, spec);
  Sink sink(o.common, out);
  sink.emit(tabulate(band, o.common.precision), to_json(band));
  sink.finish();
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out) {
  const PresetCatalog catalog = load_catalog(o.common);
  ServerOptions server = o.server;
  server.cors = !o.no_cors;
  ScenarioServer srv(catalog, server);
  const int port = srv.bind();
  out << fmt::format("listening on http://{}:{}\n", server.bind, port) << std::flush;
  srv.listen();
  return kExitOk;
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Technology race risk model: presets, tables, sweeps and Monte Carlo checks",
               "techrace"};
  app.require_subcommand(1);
  app.footer("Set TECHRACE_PRESETS to load an alternative preset file.");

  Options o;
  const std::string preset_help = "Preset name, e.g. limited/baseline/no-opp";

  auto* run = app.add_subcommand("run", "Evaluate one preset");
  run->add_option("--preset", o.preset, preset_help)->required();
  run->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(run, o.common);
  add_catalog_flags(run, o.common);

  auto* table = app.add_subcommand("table", "Emit the scenario comparison tables");
  table->add_option("--id", o.table_id, "table4 or table5");
  table->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(table, o.common);
  add_catalog_flags(table, o.common);

  auto* sweep = app.add_subcommand("sweep", "One-at-a-time sensitivity sweep");
  sweep->add_option("--param", o.param, "p_max, pi0, eta, beta, kappa, tau or all");
  sweep->add_option("--values", o.values, "Comma-separated grid values")
      ->delimiter(',');
  sweep->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(sweep, o.common);
  add_catalog_flags(sweep, o.common);

  auto* walk = app.add_subcommand("walkthrough", "Step-by-step Limited AI example");
  add_output_flags(walk, o.common);
  add_catalog_flags(walk, o.common);

  auto* val = app.add_subcommand("validate", "Check the analytic risk against Monte Carlo");
  val->add_option("--preset", o.preset, preset_help + " (default: all)");
  val->add_option("--trials", o.trials, "Trials per preset")->check(CLI::Range(1.0, 1e9));
  val->add_option("--seed", o.seed, "Random seed");
  val->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(val, o.common);
  add_catalog_flags(val, o.common);

  auto* traj = app.add_subcommand("trajectory", "Export time series for plotting");
  traj->add_option("--preset", o.preset, preset_help)->required();
  traj->add_option("--resolution", o.resolution, "Samples per year (default 100)")
      ->check(CLI::PositiveNumber);
  traj->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(traj, o.common);
  add_catalog_flags(traj, o.common);

  auto* band = app.add_subcommand("band", "Export min/max uncertainty envelopes");
  band->add_option("--preset", o.preset, preset_help)->required();
  band->add_option("--resolution", o.resolution, "Samples per year (default 10)")
      ->check(CLI::PositiveNumber);
  band->add_option("--horizon", o.horizon, "Horizon in years");
  add_output_flags(band, o.common);
  add_catalog_flags(band, o.common);

  auto* serve = app.add_subcommand("serve", "Run the JSON-over-HTTP service");
  serve->add_option("--port", o.server.port, "Port (0 picks a free one)")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--bind", o.server.bind, "Address to bind");
  serve->add_flag("--no-cors", o.no_cors, "Omit cross-origin headers");
  add_catalog_flags(serve, o.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(o, out);
    if (table->parsed()) return cmd_table(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (walk->parsed()) return cmd_walkthrough(o, out);
    if (val->parsed()) return cmd_validate(o, out);
    if (traj->parsed()) return cmd_trajectory(o, out);
    if (band->parsed()) return cmd_band(o, out);
    if (serve->parsed()) return cmd_serve(o, out);
  } catch (const ComputationFault& e) {
    err << "error: " << e.what() << '\n';
    return kExitFault;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFault;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace techrace::cli
