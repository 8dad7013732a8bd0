#include <doctest.h>

#include "glidebench/errors.hpp"
#include "glidebench/factory.hpp"

using namespace glidebench;

namespace {

const char* kTwoEntries = R"({
  "entries": [
    {"entry_id": "e1", "price_per_hour": 1.0, "max_pilots": 100},
    {"entry_id": "e2", "price_per_hour": 0.5, "max_pilots": 1}
  ],
  "benchmarks_enabled": false
})";

Factory make(const char* doc = kTwoEntries) {
  return Factory(load_config(doc), {{"s1", "s1", "", 1000, 100}});
}

std::string reason_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Rejection& r) {
    return r.reason();
  }
  return "";
}

}  // namespace

TEST_SUITE("factory") {
  TEST_CASE("load_config examples") {
    const FactoryConfig cfg = load_config(kTwoEntries);
    CHECK(cfg.version == 1);
    CHECK(cfg.entries.size() == 2);
    CHECK(cfg.cycle_period_s == 60.0);
    CHECK(cfg.max_submit_per_cycle == 100);

    try {
      load_config(R"({"entries":[{"entry_id":"e1","price_per_hour":1,"max_pilots":1},
                                  {"entry_id":"e1","price_per_hour":2,"max_pilots":1}]})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      REQUIRE(e.violations().size() == 1);
      CHECK(e.violations()[0].find("e1") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config(R"({"entries":[{"entry_id":"e1",)"), ParseError);
    CHECK_THROWS_AS(load_config(R"({"entries":[],"version":3})"), ParseError);

    try {
      load_config(R"({"entries":[{"entry_id":"","price_per_hour":-1,"max_pilots":-2}],"cycle_period_s":0})");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.violations().size() == 4);
    }
  }

  TEST_CASE("reconfig is atomic and versioned") {
    Factory f = make();
    CHECK(f.reconfig(kTwoEntries) == 2);
    const FactoryConfig before = f.config();
    CHECK_THROWS(f.reconfig(R"({"entries":[{"entry_id":"x","price_per_hour":-1,"max_pilots":1}]})"));
    CHECK(f.config() == before);
    CHECK(f.config().version == 2);

    CHECK(reason_of([&] { f.submit_single("e1", PilotPurpose::benchmark, "s1", 0); }) == "benchmarks_disabled");
    auto cfg = f.config();
    cfg.benchmarks_enabled = true;
    CHECK(f.reconfig(config_input_json(cfg).dump()) == 3);
    CHECK(f.submit_single("e1", PilotPurpose::benchmark, "s1", 0) == "p-00000001");
  }

  TEST_CASE("in-flight pilots keep their submit-time entry parameters") {
    Factory f = make();
    f.set_pressure("fe1", "e1", 1);
    f.cycle(0);
    CHECK(f.pilot_entry("p-00000001").price_per_hour == 1.0);
    auto cfg = f.config();
    cfg.entries[0].price_per_hour = 9.0;
    f.reconfig(config_input_json(cfg).dump());
    CHECK(f.pilot_entry("p-00000001").price_per_hour == 1.0);
    CHECK(f.config().find("e1")->price_per_hour == 9.0);
  }

  TEST_CASE("set_pressure examples") {
    Factory f = make();
    f.set_pressure("fe1", "e1", 10);
    f.set_pressure("fe1", "e1", 4);
    CHECK(f.total_requested("e1") == 4);
    CHECK(reason_of([&] { f.set_pressure("fe1", "missing", 1); }) == "unknown_entry");
    f.set_pressure("fe2", "e1", 3);
    CHECK(f.total_requested("e1") == 7);
  }

  TEST_CASE("cycle fills deficits") {
    Factory f = make();
    f.set_pressure("fe1", "e1", 7);
    CHECK(f.cycle(0) == std::vector<Submission>{{"e1", 7}});
    for (int i = 1; i <= 4; ++i) f.mark_running(format_pilot_id(i), 1);
    CHECK(f.queued("e1") == 3);
    CHECK(f.running("e1") == 4);
    f.set_pressure("fe1", "e1", 10);
    CHECK(f.cycle(2) == std::vector<Submission>{{"e1", 3}});
    f.set_pressure("fe1", "e1", 5);
    CHECK(f.cycle(3).empty());
    CHECK(f.in_flight("e1") == 10);  // no kills
  }

  TEST_CASE("cycle budget clamp") {
    Factory f = make(R"({"entries":[{"entry_id":"e1","price_per_hour":1,"max_pilots":100},
                                    {"entry_id":"e2","price_per_hour":1,"max_pilots":100}],
                         "max_submit_per_cycle":20})");
    f.set_pressure("fe1", "e1", 50);
    f.set_pressure("fe1", "e2", 5);
    CHECK(f.cycle(0) == std::vector<Submission>{{"e1", 20}});
    CHECK(f.cycle(60) == std::vector<Submission>{{"e1", 20}});
    CHECK(f.cycle(120) == (std::vector<Submission>{{"e1", 10}, {"e2", 5}}));
  }

  TEST_CASE("cycle respects max_pilots") {
    Factory f = make();
    f.set_pressure("fe1", "e2", 5);
    CHECK(f.cycle(0) == std::vector<Submission>{{"e2", 1}});
    CHECK(f.cycle(60).empty());
  }

  TEST_CASE("submit_single examples") {
    Factory f = make(R"({"entries":[{"entry_id":"e1","price_per_hour":1,"max_pilots":1},
                                    {"entry_id":"e3","price_per_hour":1,"max_pilots":1,"enabled":false}],
                         "benchmarks_enabled":true})");
    CHECK(f.submit_single("e1", PilotPurpose::benchmark, "s1", 0) == "p-00000001");
    const auto& p = f.pilot("p-00000001");
    CHECK(p.state == PilotState::QUEUED);
    CHECK(*p.submitted_at == 0);
    f.mark_running("p-00000001", 5);
    CHECK(reason_of([&] { f.submit_single("e1", PilotPurpose::benchmark, "s1", 6); }) == "entry_full");
    CHECK(reason_of([&] { f.submit_single("e1", PilotPurpose::benchmark, "nope", 6); }) == "unknown_spec");
    CHECK(reason_of([&] { f.submit_single("e3", PilotPurpose::benchmark, "s1", 6); }) == "entry_disabled");
    CHECK(reason_of([&] { f.submit_single("zz", PilotPurpose::benchmark, "s1", 6); }) == "unknown_entry");
  }

  TEST_CASE("query_pilots examples") {
    Factory f = make(R"({"entries":[{"entry_id":"e1","price_per_hour":1,"max_pilots":5},
                                    {"entry_id":"e2","price_per_hour":1,"max_pilots":5}],
                         "benchmarks_enabled":true})");
    PilotFilter live{std::nullopt, PilotPurpose::benchmark, {PilotState::QUEUED, PilotState::RUNNING}};
    CHECK(f.query_pilots(live).empty());
    f.submit_single("e1", PilotPurpose::benchmark, "s1", 0);
    f.submit_single("e2", PilotPurpose::benchmark, "s1", 0);
    f.submit_single("e1", PilotPurpose::benchmark, "s1", 0);
    const auto all = f.query_pilots(live);
    REQUIRE(all.size() == 3);
    CHECK(all[0].pilot_id < all[1].pilot_id);
    CHECK(all[1].pilot_id < all[2].pilot_id);
    const auto e2 = f.query_pilots({std::string("e2"), std::nullopt, {}});
    REQUIRE(e2.size() == 1);
    CHECK(e2[0].entry_id == "e2");
    for (const auto& p : f.query_pilots()) CHECK(validate_pilot_record(p).empty());
  }

  TEST_CASE("mailbox is FIFO and at-most-once") {
    Factory f = make();
    f.mailbox_post({"", "factory", "fe1", MessageKind::status_report, "{\"n\":1}", 0});
    f.mailbox_post({"", "factory", "fe1", MessageKind::status_report, "{\"n\":2}", 1});
    const auto got = f.mailbox_fetch("fe1");
    REQUIRE(got.size() == 2);
    CHECK(got[0].body == "{\"n\":1}");
    CHECK(got[1].body == "{\"n\":2}");
    CHECK(got[0].msg_id != got[1].msg_id);
    CHECK(f.mailbox_fetch("fe1").empty());
    CHECK(f.mailbox_fetch("unknown").empty());
  }

  TEST_CASE("pressure requests by mail take effect at the next cycle") {
    Factory f = make();
    f.mailbox_post({"", "fe1", "factory", MessageKind::pressure_request,
                    R"({"entry_id":"e1","requested":2})", 0});
    f.mailbox_post({"", "fe1", "factory", MessageKind::pressure_request,
                    R"({"entry_id":"missing","requested":2})", 0});
    CHECK(f.total_requested("e1") == 0);
    CHECK(f.cycle(0) == std::vector<Submission>{{"e1", 2}});
    const auto replies = f.mailbox_fetch("fe1");
    REQUIRE(replies.size() == 1);
    CHECK(replies[0].kind == MessageKind::status_report);
    CHECK(replies[0].body.find("unknown_entry") != std::string::npos);
  }
}
