#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "api_script.hpp"
#include "glidebench/api.hpp"

using namespace glidebench;

namespace {

ApiResponse get(ApiService& api, const std::string& path, std::map<std::string, std::string> q = {}) {
  return api.handle({"GET", "/api/v1" + path, std::move(q), ""});
}

ApiResponse post(ApiService& api, const std::string& path, const std::string& body) {
  return api.handle({"POST", "/api/v1" + path, {}, body});
}

}  // namespace

TEST_SUITE("api") {
  TEST_CASE("spec examples") {
    Simulation sim(testing::api_scenario());
    ApiService api(sim);
    auto r = get(api, "/status");
    CHECK(r.status == 200);
    CHECK(r.body == R"({"benchmark_pilots":{"queued":0,"running":0},"factory_version":1,"sim_time":0.0})");

    CHECK(post(api, "/campaigns", R"({"spec_id":"zzz","mode":"all_due"})").status == 400);
    CHECK(post(api, "/campaigns", R"({"spec_id":"s1","mode":"all_due"})").status == 201);
    CHECK(post(api, "/sim/advance", R"({"seconds":3600})").status == 200);
    r = get(api, "/plan", {{"demand", "650"}, {"spec", "s1"}});
    CHECK(r.status == 200);
    const auto j = parse_json_text(r.body);
    CHECK(j["total_cost"].get<double>() == doctest::Approx(4.4));
    CHECK(j["feasible"] == true);
  }

  TEST_CASE("error bodies") {
    Simulation sim(testing::api_scenario());
    ApiService api(sim);
    auto r = api.handle({"GET", "/elsewhere", {}, ""});
    CHECK(r.status == 404);
    CHECK(parse_json_text(r.body).contains("error"));
    r = post(api, "/reconfig", R"({"entries":[{"entry_id":"","price_per_hour":1,"max_pilots":1}]})");
    CHECK(r.status == 422);
    CHECK(parse_json_text(r.body)["detail"].is_array());
    CHECK(sim.factory().config().version == 1);
    r = post(api, "/reconfig", "{");
    CHECK(r.status == 400);
    CHECK(parse_json_text(r.body)["detail"].contains("line"));
  }

  TEST_CASE("GETs are side-effect free") {
    Simulation sim(testing::api_scenario());
    ApiService api(sim);
    post(api, "/campaigns", R"({"spec_id":"s1","mode":"all_due"})");
    const auto before = get(api, "/status").body;
    for (const char* path : {"/status", "/config", "/scores", "/results", "/plan", "/campaigns/c-000001"}) {
      get(api, path, {{"spec", "s1"}, {"demand", "10"}});
    }
    CHECK(get(api, "/status").body == before);
  }

  TEST_CASE("campaign visible within one runner wake") {
    Simulation sim(testing::api_scenario());
    ApiService api(sim);
    const auto created = parse_json_text(post(api, "/campaigns", R"({"spec_id":"s1","mode":"all_due"})").body);
    const std::string id = created["campaign_id"];
    post(api, "/sim/advance", R"({"seconds":300})");
    const auto s = parse_json_text(get(api, "/campaigns/" + id).body);
    CHECK(s["queued"].get<int>() + s["running"].get<int>() + s["completed"].get<int>() + s["failed"].get<int>() +
              s["timed_out"].get<int>() + s["pending_submit"].get<int>() ==
          3);
  }

  TEST_CASE("concurrent requests over HTTP see consistent state") {
    Simulation sim(testing::api_scenario());
    ApiService api(sim);
    httplib::Server server;
    api.bind(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread serving([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client admin("127.0.0.1", port);
    auto created = admin.Post("/api/v1/campaigns", R"({"spec_id":"s1","mode":"all_due"})", "application/json");
    REQUIRE(created);
    CHECK(created->status == 201);
    CHECK(created->get_header_value("Content-Type") == "application/json");

    std::vector<std::thread> clients;
    std::atomic<int> bad{0};
    for (int t = 0; t < 4; ++t) {
      clients.emplace_back([&, t] {
        httplib::Client c("127.0.0.1", port);
        for (int i = 0; i < 25; ++i) {
          if (t == 0) {
            auto r = c.Post("/api/v1/sim/advance", R"({"seconds":30})", "application/json");
            if (!r || r->status != 200) ++bad;
            continue;
          }
          auto r = c.Get("/api/v1/campaigns/c-000001");
          if (!r || r->status != 200) {
            ++bad;
            continue;
          }
          const auto s = parse_json_text(r->body);
          int sum = 0;
          for (const char* k : {"queued", "running", "completed", "failed", "timed_out", "pending_submit"}) {
            sum += s[k].get<int>();
          }
          if (sum != 3) ++bad;
        }
      });
    }
    for (auto& c : clients) c.join();
    CHECK(bad == 0);
    auto missing = admin.Get("/api/v1/nowhere");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    server.stop();
    serving.join();
  }
}
