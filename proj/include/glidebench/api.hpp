#pragma once

#include <map>
#include <mutex>
#include <string>

#include "glidebench/simulation.hpp"

namespace httplib {
class Server;
}

namespace glidebench {

inline constexpr std::string_view kApiPrefix = "/api/v1";

struct ApiRequest {
  std::string method;  // "GET" | "POST"
  std::string path;    // e.g. /api/v1/scores
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string body;  // JSON text
};

// REST surface over a simulation. handle() is transport-independent and
// serializes every request on one mutex, so readers never see a half-applied
// command; bind() mounts it on an HTTP server.
//
//   GET  /api/v1/status
//   GET  /api/v1/scores?spec=<id>
//   GET  /api/v1/results?entry=<id>&spec=<id>&limit=<n>
//   POST /api/v1/campaigns            {spec_id, mode, min_interval_s?}
//   GET  /api/v1/campaigns/<id>
//   GET  /api/v1/plan?demand=<x>&spec=<id>
//   POST /api/v1/reconfig             factory config input document
//   GET  /api/v1/config
//   POST /api/v1/sim/advance          {seconds}
class ApiService {
 public:
  explicit ApiService(Simulation& sim) : sim_(sim) {}

  ApiResponse handle(const ApiRequest& request);
  void bind(httplib::Server& server);

 private:
  ApiResponse dispatch(const ApiRequest& request);
  ApiResponse status() const;
  ApiResponse scores(const ApiRequest& request) const;
  ApiResponse results(const ApiRequest& request) const;
  ApiResponse create_campaign(const ApiRequest& request);
  ApiResponse campaign(const std::string& id) const;
  ApiResponse plan(const ApiRequest& request) const;
  ApiResponse reconfig(const ApiRequest& request);
  ApiResponse config() const;
  ApiResponse advance(const ApiRequest& request);

  Simulation& sim_;
  std::mutex mu_;
};

}  // namespace glidebench
