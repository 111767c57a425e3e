#include "techrace/service.hpp"

#include <cmath>

#include <fmt/format.h>
#include <httplib.h>

#include "techrace/error.hpp"
#include "techrace/montecarlo.hpp"
#include "techrace/report.hpp"
#include "techrace/sensitivity.hpp"

namespace techrace {
namespace {

// A resource guard tripped: well-formed request, too expensive to serve.
class GuardError : public Error {
 public:
  GuardError(std::string field, std::string message)
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

HttpResponse json_response(int status, const Json& body) {
  return {status, body.dump()};
}

HttpResponse error_response(int status, const std::string& message,
                            const std::vector<FieldIssue>& issues = {}) {
  Json list = Json::array();
  for (const auto& i : issues) {
    list.push_back({{"field", i.field}, {"message", i.message}});
  }
  return json_response(status, {{"error", message}, {"issues", std::move(list)}});
}

Json parse_body(std::string_view body) {
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) throw ValidationError("body", "malformed JSON");
  if (!j.is_object()) throw ValidationError("body", "must be a JSON object");
  return j;
}

// Either {"params": {...}} or the flat parameter object itself.
const Json& params_node(const Json& body) {
  const auto it = body.find("params");
  return it != body.end() ? *it : body;
}

double read_optional(const Json& body, const char* field, double fallback) {
  const auto it = body.find(field);
  if (it == body.end() || it->is_null()) return fallback;
  if (!it->is_number()) throw ValidationError(field, "must be a number");
  return it->get<double>();
}

void guard_horizon(const ModelParams& p) {
  if (p.horizon > kMaxHorizon) {
    throw GuardError("horizon", fmt::format("horizon exceeds {:g} years", kMaxHorizon));
  }
}

template <typename Fn>
HttpResponse guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const GuardError& e) {
    return error_response(422, e.what(), {{e.field(), e.what()}});
  } catch (const ValidationError& e) {
    return error_response(400, e.what(), e.issues());
  } catch (const LookupError& e) {
    return error_response(400, e.what());
  } catch (const PreconditionError& e) {
    return error_response(400, e.what());
  } catch (const DomainError& e) {
    return error_response(400, e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

}  // namespace

HttpResponse ScenarioService::presets() const {
  return guarded([&] {
    Json list = Json::array();
    for (const auto& name : catalog_.names()) {
      const ScenarioSpec spec = catalog_.spec(name);
      list.push_back({{"name", name},
                      {"display_name", catalog_.display_name(spec)},
                      {"regime", std::string(to_string(spec.regime))},
                      {"det", std::string(to_string(spec.det))},
                      {"opportunistic", spec.opportunistic},
                      {"params", params_to_json(catalog_.build(spec))}});
    }
    return json_response(200, {{"presets", std::move(list)}});
  });
}

HttpResponse ScenarioService::evaluate(std::string_view body) const {
  return guarded([&] {
    const Json j = parse_body(body);
    const double resolution = read_optional(j, "resolution", kDefaultResolution);
    const ModelParams p = params_from_json(params_node(j));
    guard_horizon(p);
    if (!(resolution >= 1.0)) {
      throw ValidationError("resolution", "must be >= 1 sample per year");
    }
    if (resolution > kMaxResolution) {
      throw GuardError("resolution", fmt::format("resolution exceeds {:g} samples per year",
                                                 kMaxResolution));
    }

    const Trajectory tr = sample_trajectory(p, resolution);
    const double r = cumulative_risk(p);
    const auto crossing = crossing_times(p).first_persistent;
    Json series = to_json(tr);
    series.erase("integrand");
    return json_response(
        200, {{"params", params_to_json(p)},
              {"resolution", resolution},
              {"series", std::move(series)},
              {"summary",
               {{"r", r},
                {"p", breakout_prob(r)},
                {"crossing", crossing ? Json(*crossing) : Json(nullptr)}}}});
  });
}

HttpResponse ScenarioService::sweep(std::string_view body) const {
  return guarded([&] {
    const Json j = parse_body(body);
    const auto param = j.find("parameter");
    if (param == j.end() || !param->is_string()) {
      throw ValidationError("parameter", "missing or not a string");
    }
    SweepGrid grid = default_sweep(parse_sweep_parameter(param->get<std::string>()),
                                   catalog_);
    if (const auto v = j.find("values"); v != j.end()) {
      if (!v->is_array() || v->empty()) {
        throw ValidationError("values", "must be a non-empty array of numbers");
      }
      grid.values.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ValidationError("values", "must contain only numbers");
        grid.values.push_back(x.get<double>());
      }
    }
    if (const auto r = j.find("regimes"); r != j.end()) {
      if (!r->is_array() || r->empty()) {
        throw ValidationError("regimes", "must be a non-empty array of names");
      }
      grid.regimes.clear();
      for (const auto& x : *r) {
        if (!x.is_string()) throw ValidationError("regimes", "must contain only names");
        grid.regimes.push_back(parse_regime(x.get<std::string>()));
      }
    }
    if (j.contains("params")) grid.base = params_from_json(j.at("params"));
    guard_horizon(grid.base);
    if (grid.values.size() > kMaxSweepValues) {
      throw GuardError("values", fmt::format("more than {} grid values", kMaxSweepValues));
    }
    // Reject values that make the model invalid before fanning out.
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
      ModelParams probe = grid.base;
      set_param(probe, to_string(grid.parameter), grid.values[i]);
      try {
        validate(probe);
      } catch (const ValidationError& e) {
        std::vector<FieldIssue> issues = e.issues();
        for (auto& issue : issues) {
          issue.field = fmt::format("values[{}] ({})", i, issue.field);
        }
        throw ValidationError(std::move(issues));
      }
    }
    return json_response(200, to_json(oat_sweep(grid, catalog_)));
  });
}

HttpResponse ScenarioService::montecarlo(std::string_view body) const {
  return guarded([&] {
    const Json j = parse_body(body);
    MCConfig config;
    if (const auto preset = j.find("preset"); preset != j.end()) {
      if (!preset->is_string()) throw ValidationError("preset", "must be a string");
      config.params = catalog_.build_preset(preset->get<std::string>());
    } else {
      config.params = params_from_json(params_node(j));
    }
    guard_horizon(config.params);

    const auto trials = j.find("trials");
    if (trials == j.end()) throw ValidationError("trials", "missing");
    if (!trials->is_number_integer() && !trials->is_number_unsigned()) {
      throw ValidationError("trials", "must be an integer");
    }
    if (trials->is_number_unsigned()
            ? static_cast<double>(trials->get<std::uint64_t>()) > kMaxTrials
            : static_cast<double>(trials->get<std::int64_t>()) > kMaxTrials) {
      throw GuardError("trials", fmt::format("trials exceed {:g}", kMaxTrials));
    }
    if (!trials->is_number_unsigned() || trials->get<std::uint64_t>() < 1) {
      throw ValidationError("trials", "must be >= 1");
    }
    config.trials = trials->get<std::uint64_t>();

    if (const auto seed = j.find("seed"); seed != j.end()) {
      if (!seed->is_number_unsigned()) {
        throw ValidationError("seed", "must be a non-negative integer");
      }
      config.seed = seed->get<std::uint64_t>();
    }
    if (const auto rate = j.find("max_rate"); rate != j.end() && !rate->is_null()) {
      if (!rate->is_number()) throw ValidationError("max_rate", "must be a number");
      config.max_rate = rate->get<double>();
    }

    const MCResult result = simulate(config);
    Json out = to_json(result);
    const double r = cumulative_risk(config.params);
    out["analytic"] = {{"r", r}, {"p", breakout_prob(r)}};
    return json_response(200, out);
  });
}

struct ScenarioServer::Impl {
  ScenarioService service;
  ServerOptions options;
  httplib::Server server;
  bool bound = false;
  int port = 0;

  Impl(const PresetCatalog& catalog, ServerOptions opts)
      : service(catalog), options(std::move(opts)) {}
};

ScenarioServer::ScenarioServer(const PresetCatalog& catalog, ServerOptions options)
    : impl_(std::make_unique<Impl>(catalog, std::move(options))) {
  auto& s = impl_->server;
  if (impl_->options.cors) {
    s.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  }
  auto reply = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  const ScenarioService* svc = &impl_->service;
  s.Get("/api/presets", [svc, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, svc->presets());
  });
  s.Post("/api/evaluate", [svc, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc->evaluate(req.body));
  });
  s.Post("/api/sweep", [svc, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc->sweep(req.body));
  });
  s.Post("/api/montecarlo", [svc, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc->montecarlo(req.body));
  });
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
}

ScenarioServer::~ScenarioServer() { stop(); }

int ScenarioServer::bind() {
  if (impl_->bound) return impl_->port;
  const auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.bind);
    if (impl_->port < 0) throw Error("cannot bind to " + o.bind);
  } else {
    if (!impl_->server.bind_to_port(o.bind, o.port)) {
      throw Error(fmt::format("cannot bind to {}:{}", o.bind, o.port));
    }
    impl_->port = o.port;
  }
  impl_->bound = true;
  return impl_->port;
}

void ScenarioServer::listen() {
  bind();
  impl_->server.listen_after_bind();
}

void ScenarioServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void ScenarioServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace techrace
