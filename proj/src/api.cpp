#include "glidebench/api.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <cmath>

#include "glidebench/errors.hpp"

namespace glidebench {

namespace {

ApiResponse reply(int status, const ordered_json& body) { return {status, body.dump()}; }

ApiResponse error(int status, std::string code, std::optional<ordered_json> detail = std::nullopt) {
  ordered_json j;
  j["error"] = std::move(code);
  if (detail) j["detail"] = *detail;
  return reply(status, j);
}

std::optional<double> parse_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(const std::string& text) {
  std::int64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

const std::string* param(const ApiRequest& r, const std::string& key) {
  auto it = r.query.find(key);
  return it == r.query.end() ? nullptr : &it->second;
}

}  // namespace

ApiResponse ApiService::handle(const ApiRequest& request) {
  std::lock_guard lock(mu_);
  try {
    return dispatch(request);
  } catch (const std::exception& e) {
    return error(500, "internal_error", ordered_json(e.what()));
  }
}

ApiResponse ApiService::dispatch(const ApiRequest& r) {
  const std::string prefix(kApiPrefix);
  if (r.path.rfind(prefix + "/", 0) != 0) return error(404, "not_found", ordered_json(r.path));
  const std::string route = r.path.substr(prefix.size());

  if (r.method == "GET") {
    if (route == "/status") return status();
    if (route == "/scores") return scores(r);
    if (route == "/results") return results(r);
    if (route == "/plan") return plan(r);
    if (route == "/config") return config();
    const std::string campaigns = "/campaigns/";
    if (route.rfind(campaigns, 0) == 0 && route.size() > campaigns.size() &&
        route.find('/', campaigns.size()) == std::string::npos) {
      return campaign(route.substr(campaigns.size()));
    }
  } else if (r.method == "POST") {
    if (route == "/campaigns") return create_campaign(r);
    if (route == "/reconfig") return reconfig(r);
    if (route == "/sim/advance") return advance(r);
  }
  return error(404, "not_found", ordered_json(r.method + " " + r.path));
}

ApiResponse ApiService::status() const {
  const Factory& f = sim_.factory();
  ordered_json j;
  j["benchmark_pilots"] = {{"queued", f.benchmark_count(PilotState::QUEUED)},
                           {"running", f.benchmark_count(PilotState::RUNNING)}};
  j["factory_version"] = f.config().version;
  j["sim_time"] = sim_.now();
  return reply(200, j);
}

ApiResponse ApiService::scores(const ApiRequest& r) const {
  const std::string* spec = param(r, "spec");
  if (spec == nullptr || spec->empty()) return error(400, "invalid_params", ordered_json("missing 'spec'"));
  if (sim_.factory().find_spec(*spec) == nullptr) {
    return error(400, "invalid_params", ordered_json("unknown spec '" + *spec + "'"));
  }
  ordered_json arr = ordered_json::array();
  for (const auto& s : sim_.scores(*spec)) arr.push_back(to_json(s, sim_.now()));
  return reply(200, arr);
}

ApiResponse ApiService::results(const ApiRequest& r) const {
  const std::string* entry = param(r, "entry");
  const std::string* spec = param(r, "spec");
  std::optional<std::int64_t> limit;
  if (const std::string* l = param(r, "limit")) {
    limit = parse_int(*l);
    if (!limit || *limit < 1) {
      return error(400, "invalid_params", ordered_json("'limit' must be a positive integer"));
    }
  }
  const auto& all = sim_.store().results();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (entry && all[i].entry_id != *entry) continue;
    if (spec && all[i].spec_id != *spec) continue;
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&all](std::size_t a, std::size_t b) {
    if (all[a].started_at != all[b].started_at) return all[a].started_at > all[b].started_at;
    return a > b;
  });
  if (limit && idx.size() > static_cast<std::size_t>(*limit)) idx.resize(static_cast<std::size_t>(*limit));
  ordered_json arr = ordered_json::array();
  for (std::size_t i : idx) arr.push_back(to_json(all[i]));
  return reply(200, arr);
}

ApiResponse ApiService::create_campaign(const ApiRequest& r) {
  RunnerPolicy policy = sim_.scenario().policy;
  try {
    const ordered_json body = parse_json_text(r.body);
    ObjectReader in(body, "campaign request");
    policy.spec_id = in.string("spec_id");
    const std::string mode = in.string("mode");
    auto parsed = parse_sampling_mode(mode);
    if (!parsed) throw ParseError("unknown mode '" + mode + "'");
    policy.mode = *parsed;
    policy.min_interval_s = in.number_or("min_interval_s", policy.min_interval_s);
    in.finish();
  } catch (const ParseError& e) {
    return error(400, "invalid_body", ordered_json(e.what()));
  }
  if (auto v = validate_runner_policy(policy); !v.empty()) {
    return error(400, "invalid_body", ordered_json(v));
  }
  if (sim_.factory().find_spec(policy.spec_id) == nullptr) {
    return error(400, "invalid_body", ordered_json("unknown spec_id '" + policy.spec_id + "'"));
  }
  try {
    const CampaignRecord& c = sim_.trigger_campaign(policy);
    return reply(201, campaign_summary_json(c));
  } catch (const ValidationError& e) {
    return error(422, "reconfig_failed", ordered_json(e.violations()));
  } catch (const std::invalid_argument& e) {
    return error(409, "no_entries_selected", ordered_json(e.what()));
  }
}

ApiResponse ApiService::campaign(const std::string& id) const {
  try {
    return reply(200, to_json(sim_.runner().campaign_status(id), id));
  } catch (const NotFound&) {
    return error(404, "campaign_not_found", ordered_json(id));
  }
}

ApiResponse ApiService::plan(const ApiRequest& r) const {
  const std::string* demand_text = param(r, "demand");
  const std::string* spec = param(r, "spec");
  if (demand_text == nullptr) return error(400, "invalid_params", ordered_json("missing 'demand'"));
  const auto demand = parse_double(*demand_text);
  if (!demand || !(*demand > 0.0)) {
    return error(400, "invalid_params", ordered_json("'demand' must be a number > 0"));
  }
  if (spec == nullptr || sim_.factory().find_spec(*spec) == nullptr) {
    return error(400, "invalid_params", ordered_json("missing or unknown 'spec'"));
  }
  const auto p = sim_.plan(*demand, *spec);
  ordered_json j;
  j["demand"] = *demand;
  j["spec_id"] = *spec;
  const ordered_json plan_j = to_json(p.plan);
  for (const auto& [k, v] : plan_j.items()) j[k] = v;
  j["unknown"] = p.unknown;
  return reply(200, j);
}

ApiResponse ApiService::reconfig(const ApiRequest& r) {
  try {
    const auto version = sim_.reconfig(r.body);
    return reply(200, ordered_json{{"version", version}});
  } catch (const ParseError& e) {
    ordered_json detail;
    detail["message"] = e.what();
    if (e.line() > 0) {
      detail["line"] = e.line();
      detail["column"] = e.column();
    }
    return error(400, "invalid_body", detail);
  } catch (const ValidationError& e) {
    return error(422, "validation_failed", ordered_json(e.violations()));
  }
}

ApiResponse ApiService::config() const { return reply(200, config_json(sim_.factory().config())); }

ApiResponse ApiService::advance(const ApiRequest& r) {
  double seconds = 0.0;
  try {
    const ordered_json body = parse_json_text(r.body);
    ObjectReader in(body, "advance request");
    seconds = in.number("seconds");
    in.finish();
  } catch (const ParseError& e) {
    return error(400, "invalid_body", ordered_json(e.what()));
  }
  if (!(seconds >= 0.0)) return error(400, "invalid_body", ordered_json("'seconds' must be >= 0"));
  sim_.advance_by(seconds);
  return reply(200, ordered_json{{"sim_time", sim_.now()}});
}

void ApiService::bind(httplib::Server& server) {
  auto adapt = [this](const char* method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      ApiRequest r;
      r.method = method;
      r.path = req.path;
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      r.body = req.body;
      const ApiResponse out = handle(r);
      res.status = out.status;
      res.set_content(out.body, "application/json");
    };
  };
  server.Get(R"(/.*)", adapt("GET"));
  server.Post(R"(/.*)", adapt("POST"));
}

}  // namespace glidebench
