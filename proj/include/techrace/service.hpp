#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "techrace/scenario.hpp"

namespace techrace {

struct HttpResponse {
  int status = 200;
  std::string body;  // application/json
};

// Resource guards for the public service.
inline constexpr double kMaxHorizon = 200.0;
inline constexpr double kMaxResolution = 1e4;
inline constexpr double kMaxTrials = 1e7;
inline constexpr std::size_t kMaxSweepValues = 1000;
inline constexpr double kDefaultResolution = 100.0;

// Stateless request handlers; each takes the raw request body. Errors come
// back as {"error": ..., "issues": [{"field", "message"}]} with 400 for
// malformed input and 422 when a resource guard trips.
class ScenarioService {
 public:
  explicit ScenarioService(const PresetCatalog& catalog) : catalog_(catalog) {}

  HttpResponse presets() const;
  HttpResponse evaluate(std::string_view body) const;
  HttpResponse sweep(std::string_view body) const;
  HttpResponse montecarlo(std::string_view body) const;

 private:
  const PresetCatalog& catalog_;
};

struct ServerOptions {
  std::string bind = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  bool cors = true;
};

// HTTP/1.1 front end over ScenarioService.
class ScenarioServer {
 public:
  ScenarioServer(const PresetCatalog& catalog, ServerOptions options);
  ~ScenarioServer();
  ScenarioServer(const ScenarioServer&) = delete;
  ScenarioServer& operator=(const ScenarioServer&) = delete;

  // Binds the socket; returns the bound port. Throws Error on failure.
  int bind();
  // Serves until stop(). bind() is called first if needed.
  void listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace techrace
