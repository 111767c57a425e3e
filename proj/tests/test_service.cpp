#include <gtest/gtest.h>

#include <thread>

#include <httplib.h>

#include "frozen_values.hpp"
#include "techrace/report.hpp"
#include "techrace/service.hpp"

namespace techrace {
namespace {

const ScenarioService& service() {
  static const ScenarioService s(PresetCatalog::builtin());
  return s;
}

Json body_of(const HttpResponse& r) { return Json::parse(r.body); }

Json preset_params(const std::string& name) {
  return params_to_json(build_preset(name));
}

TEST(Presets, ListsTwelveWithPayloads) {
  const HttpResponse r = service().presets();
  ASSERT_EQ(r.status, 200);
  const Json j = body_of(r);
  ASSERT_EQ(j["presets"].size(), 12u);
  for (const auto& p : j["presets"]) {
    if (p["name"] == "transformative/baseline/opp") {
      EXPECT_DOUBLE_EQ(p["params"]["g_p"].get<double>(), 1.19);
      EXPECT_EQ(p["display_name"], "Transformative AI + Opportunistic");
    }
  }
}

TEST(Presets, RoundTripThroughEvaluate) {
  const Json list = body_of(service().presets())["presets"];
  for (const auto& p : list) {
    const HttpResponse r = service().evaluate(Json{{"params", p["params"]}}.dump());
    ASSERT_EQ(r.status, 200) << r.body;
    const Json j = body_of(r);
    EXPECT_EQ(j["params"], p["params"]);
    const ModelParams params = params_from_json(p["params"]);
    EXPECT_EQ(j["summary"]["r"].get<double>(), cumulative_risk(params));
  }
}

TEST(Evaluate, LimitedBaselineSummaryAndSeries) {
  const HttpResponse r =
      service().evaluate(Json{{"params", preset_params("limited/baseline/no-opp")},
                              {"resolution", 20}}
                             .dump());
  ASSERT_EQ(r.status, 200);
  const Json j = body_of(r);
  EXPECT_NEAR(j["summary"]["r"].get<double>(), frozen::kRLimitedBaseline, 1e-8);
  EXPECT_NEAR(j["summary"]["crossing"].get<double>(), frozen::kTStarLimited, 1e-9);
  const auto& s = j["series"];
  const std::size_t n = s["t"].size();
  for (const char* key : {"p", "d", "rai", "pr_detect", "hazard", "cumulative_r"}) {
    EXPECT_EQ(s[key].size(), n) << key;
  }
  EXPECT_NEAR(s["cumulative_r"].back().get<double>(), j["summary"]["r"].get<double>(), 1e-8);
}

TEST(Evaluate, FlatBodyAndNullCrossing) {
  Json flat = preset_params("limited/moonshot/no-opp");
  flat["lambda0"] = 0.0;
  const Json j = body_of(service().evaluate(flat.dump()));
  EXPECT_EQ(j["summary"]["r"].get<double>(), 0.0);
  EXPECT_TRUE(j["summary"]["crossing"].is_null());
}

TEST(Evaluate, MissingFieldNamed) {
  Json p = preset_params("limited/baseline/no-opp");
  p.erase("kappa");
  const HttpResponse r = service().evaluate(Json{{"params", p}}.dump());
  EXPECT_EQ(r.status, 400);
  const Json j = body_of(r);
  ASSERT_EQ(j["issues"].size(), 1u);
  EXPECT_EQ(j["issues"][0]["field"], "kappa");
}

TEST(Evaluate, MalformedAndInvalid) {
  EXPECT_EQ(service().evaluate("{not json").status, 400);
  EXPECT_EQ(service().evaluate("[1,2]").status, 400);
  Json p = preset_params("limited/baseline/no-opp");
  p["pi0"] = "high";
  p["det_steps"][1]["t"] = 2.0;
  const HttpResponse r = service().evaluate(Json{{"params", p}}.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body_of(r)["issues"][0]["field"], "pi0");
}

TEST(Evaluate, ResourceGuards) {
  Json p = preset_params("limited/baseline/no-opp");
  p["horizon"] = 201.0;
  EXPECT_EQ(service().evaluate(Json{{"params", p}}.dump()).status, 422);
  p["horizon"] = 10.0;
  EXPECT_EQ(service().evaluate(Json{{"params", p}, {"resolution", 2e4}}.dump()).status, 422);
  EXPECT_EQ(service().evaluate(Json{{"params", p}, {"resolution", 0.5}}.dump()).status, 400);
}

TEST(Sweep, EtaSurfaceMatchesLibrary) {
  const HttpResponse r =
      service().sweep(Json{{"parameter", "eta"}, {"values", {1, 2, 3, 4, 5}}}.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const Json j = body_of(r);
  ASSERT_EQ(j["r10"].size(), 5u);
  ASSERT_EQ(j["r10"][0].size(), 3u);
  const auto& c = PresetCatalog::builtin();
  const SweepSurface s = oat_sweep(default_sweep(SweepParameter::eta, c), c);
  EXPECT_EQ(j["r10"][2][1].get<double>(), s.at(2, 1));
}

TEST(Sweep, Errors) {
  EXPECT_EQ(service().sweep(R"({"parameter": "gamma"})").status, 400);
  EXPECT_EQ(service().sweep(R"({"values": [1]})").status, 400);
  EXPECT_EQ(service().sweep(R"({"parameter": "pi0", "values": [1.5]})").status, 400);
  Json big{{"parameter", "eta"}, {"values", std::vector<double>(1001, 1.0)}};
  EXPECT_EQ(service().sweep(big.dump()).status, 422);
}

TEST(MonteCarlo, DeterministicAndGuarded) {
  const std::string body =
      Json{{"preset", "limited/baseline/no-opp"}, {"trials", 100000}, {"seed", 5}}.dump();
  const HttpResponse a = service().montecarlo(body);
  const HttpResponse b = service().montecarlo(body);
  ASSERT_EQ(a.status, 200) << a.body;
  EXPECT_EQ(a.body, b.body);
  const Json j = body_of(a);
  const double mean = j["mean_undetected"]["value"].get<double>();
  const double hw = j["mean_undetected"]["ci99_half_width"].get<double>();
  EXPECT_LE(std::abs(mean - frozen::kRLimitedBaseline), hw);

  EXPECT_EQ(service().montecarlo(R"({"preset": "limited/baseline/no-opp", "trials": 20000000})").status, 422);
  EXPECT_EQ(service().montecarlo(R"({"preset": "limited/baseline/no-opp", "trials": 0})").status, 400);
  EXPECT_EQ(service().montecarlo(R"({"preset": "limited/baseline/no-opp"})").status, 400);
  EXPECT_EQ(service().montecarlo(R"({"preset": "nope", "trials": 10})").status, 400);
}

TEST(Server, HttpRoundTrip) {
  ScenarioServer server(PresetCatalog::builtin(), ServerOptions{"127.0.0.1", 0, true});
  const int port = server.bind();
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto presets = client.Get("/api/presets");
  ASSERT_TRUE(presets);
  EXPECT_EQ(presets->status, 200);
  EXPECT_EQ(presets->get_header_value("Access-Control-Allow-Origin"), "*");

  auto eval = client.Post("/api/evaluate",
                          Json{{"params", preset_params("disruptive/baseline/no-opp")}}.dump(),
                          "application/json");
  ASSERT_TRUE(eval);
  EXPECT_EQ(eval->status, 200);
  EXPECT_NEAR(Json::parse(eval->body)["summary"]["r"].get<double>(),
              frozen::kRDisruptiveBaseline, 1e-8);

  auto bad = client.Post("/api/montecarlo", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  server.stop();
  t.join();
}

TEST(Server, CorsCanBeDisabled) {
  ScenarioServer server(PresetCatalog::builtin(), ServerOptions{"127.0.0.1", 0, false});
  const int port = server.bind();
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/presets");
  ASSERT_TRUE(res);
  EXPECT_FALSE(res->has_header("Access-Control-Allow-Origin"));
  server.stop();
  t.join();
}

}  // namespace
}  // namespace techrace
