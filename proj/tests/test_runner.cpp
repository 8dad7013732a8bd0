#include <doctest.h>

#include "glidebench/errors.hpp"
#include "glidebench/runner.hpp"

using namespace glidebench;

namespace {

std::vector<EntryConfig> entries(std::initializer_list<const char*> ids, const char* cpu = "X") {
  std::vector<EntryConfig> out;
  for (const char* id : ids) out.push_back({id, "", cpu, 1.0, 1, true, true});
  return out;
}

RunnerPolicy policy(SamplingMode mode = SamplingMode::all_due) {
  RunnerPolicy p;
  p.spec_id = "s1";
  p.mode = mode;
  return p;
}

Factory factory_with(std::size_t n, std::int64_t max_pilots = 1) {
  FactoryConfig cfg;
  for (std::size_t i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "e%03zu", i);
    cfg.entries.push_back({id, "", "cpu", 1.0, max_pilots, true, true});
  }
  return Factory(cfg, {{"s1", "s1", "", 1000, 100}});
}

void finish_all(Factory& f, SimTime now) {
  for (const auto& p : f.query_pilots({std::nullopt, std::nullopt, {PilotState::QUEUED}})) {
    f.mark_running(p.pilot_id, now);
    f.mark_finished(p.pilot_id, PilotState::COMPLETED, now, {});
  }
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("due_entries examples") {
    const auto es = entries({"e1"});
    CHECK(due_entries(es, {{"e1", 0.0}}, 82800, policy()).empty());
    CHECK(due_entries(es, {{"e1", 0.0}}, 86400, policy()) == std::vector<std::string>{"e1"});
    CHECK(due_entries(es, {}, 0, policy()) == std::vector<std::string>{"e1"});
    auto off = es;
    off[0].enabled = false;
    CHECK(due_entries(off, {}, 0, policy()).empty());
  }

  TEST_CASE("sample_representatives examples") {
    const std::map<std::string, std::string> fp{{"e1", "x"}, {"e2", "x"}, {"e3", "x"}};
    const auto rep = policy(SamplingMode::representative_per_class);
    const std::vector<std::string> all{"e1", "e2", "e3"};
    CHECK(sample_representatives(all, fp, {}, rep) == all);
    CHECK(sample_representatives({"e1", "e2"}, fp, {{"e1", 100}, {"e2", 50}}, rep) ==
          std::vector<std::string>{"e2"});
    CHECK(sample_representatives({"e1", "e2"}, fp, {{"e1", 50}, {"e2", 50}}, rep) ==
          std::vector<std::string>{"e1"});
    CHECK(sample_representatives({"e1", "e2"}, fp, {{"e1", 50}}, policy(SamplingMode::new_only)) ==
          std::vector<std::string>{"e2"});
    CHECK(sample_representatives(all, fp, {{"e1", 50}}, policy()) == all);
  }

  TEST_CASE("launch enables benchmarks with one reconfig") {
    Factory f = factory_with(3);
    Runner r(f);
    const auto& c = r.trigger(policy(), 0);
    CHECK(f.config().version == 2);
    CHECK(f.config().benchmarks_enabled);
    CHECK(c.pilot_map.size() == 3);
    CHECK(c.reconfigured);
    CHECK(r.campaign_status(c.campaign_id) == CampaignStatus{3, 0, 0, 0, 0, 0});
    finish_all(f, 10);
    r.wake(10);
    CHECK(r.campaign_status("c-000001").completed == 3);
    // Second campaign: everything ran recently, so nothing is due.
    CHECK_THROWS_AS(r.trigger(policy(), 20), std::invalid_argument);
    // A day later: due again, no further reconfig.
    r.trigger(policy(), 86410);
    CHECK(f.config().version == 2);
    CHECK(r.reconfigs_issued() == 1);
  }

  TEST_CASE("throttle keeps live benchmarks under the cap") {
    Factory f = factory_with(500);
    Runner r(f);
    auto p = policy();
    p.max_concurrent_benchmarks = 200;
    const auto& c = r.trigger(p, 0);
    CHECK(f.live_benchmarks() == 200);
    CHECK(r.campaign_status(c.campaign_id).total() == 500);
    CHECK(r.campaign_status(c.campaign_id).pending_submit == 300);
    SimTime t = 0;
    while (r.campaign_status("c-000001").pending_submit > 0) {
      t += 300;
      finish_all(f, t);
      r.wake(t);
      CHECK(f.live_benchmarks() <= 200);
      CHECK(r.campaign_status("c-000001").total() == 500);
    }
    finish_all(f, t + 1);
    r.wake(t + 1);
    CHECK(r.campaign_status("c-000001").completed == 500);
  }

  TEST_CASE("entry_full submissions are retried on wake") {
    Factory f = factory_with(1);
    FactoryConfig cfg = f.config();
    cfg.benchmarks_enabled = true;
    f.reconfig(cfg);
    f.set_pressure("fe", "e000", 1);
    f.cycle(0);  // the single slot goes to a user pilot
    Runner r(f);
    const auto& c = r.trigger(policy(), 0);
    CHECK(c.pending.size() == 1);
    finish_all(f, 5);
    r.wake(300);
    CHECK(r.campaign("c-000001").pending.empty());
    CHECK(r.campaign_status("c-000001").queued == 1);
  }

  TEST_CASE("campaign errors") {
    Factory f = factory_with(1);
    Runner r(f);
    CHECK_THROWS_AS(r.campaign_status("c-999999"), NotFound);
    CHECK_THROWS_AS(r.launch_campaign({}, policy(), 0), std::invalid_argument);
    auto bad = policy();
    bad.spec_id = "nope";
    CHECK_THROWS_AS(r.trigger(bad, 0), std::invalid_argument);
    auto zero = policy();
    zero.min_interval_s = 0;
    CHECK_THROWS_AS(r.trigger(zero, 0), ValidationError);
  }

  TEST_CASE("policy block parsing") {
    const auto p = policy_from_json(parse_json_text(R"({"spec_id":"s1","mode":"new_only"})"));
    CHECK(p.min_interval_s == 86400);
    CHECK(p.max_concurrent_benchmarks == 200);
    CHECK(p.mode == SamplingMode::new_only);
    CHECK_THROWS(policy_from_json(parse_json_text(R"({"spec_id":"s1","mode":"sometimes"})")));
    CHECK_THROWS(policy_from_json(parse_json_text(R"({"spec_id":"s1","cadence":1})")));
  }
}
