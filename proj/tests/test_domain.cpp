#include <doctest.h>

#include <random>

#include "glidebench/domain.hpp"
#include "helpers.hpp"

using namespace glidebench;

TEST_SUITE("domain") {
  TEST_CASE("validate_entry_config examples") {
    EntryConfig ok{"e1", "site", "cpu", 1.0, 10, true, true};
    CHECK(validate_entry_config(ok).empty());

    EntryConfig empty = ok;
    empty.entry_id = "";
    CHECK(validate_entry_config(empty) == std::vector<std::string>{"entry_id empty"});

    EntryConfig neg = ok;
    neg.price_per_hour = -0.5;
    CHECK(validate_entry_config(neg) == std::vector<std::string>{"price_per_hour negative"});

    EntryConfig both = ok;
    both.price_per_hour = -1;
    both.max_pilots = -1;
    CHECK(validate_entry_config(both).size() == 2);

    EntryConfig caps = ok;
    caps.entry_id = "E1";
    CHECK(validate_entry_config(caps).size() == 1);
  }

  TEST_CASE("hardware_fingerprint examples and idempotence") {
    CHECK(hardware_fingerprint(" Intel(R)  Xeon(R) Gold 6148 ") == "intel(r) xeon(r) gold 6148");
    CHECK(hardware_fingerprint("AMD EPYC 7763") == "amd epyc 7763");
    CHECK(hardware_fingerprint("") == "");
    CHECK(hardware_fingerprint("\t a \n\n B\t") == "a b");

    std::mt19937 gen(3);
    const std::string alphabet = " \tAbC xY\n1";
    for (int i = 0; i < 500; ++i) {
      std::string s;
      const int len = static_cast<int>(gen() % 20);
      for (int k = 0; k < len; ++k) s += alphabet[gen() % alphabet.size()];
      const std::string once = hardware_fingerprint(s);
      CHECK(hardware_fingerprint(once) == once);
    }
  }

  TEST_CASE("pilot transitions follow the lifecycle graph") {
    const PilotState all[] = {PilotState::SUBMITTED, PilotState::QUEUED,  PilotState::RUNNING,
                              PilotState::COMPLETED, PilotState::FAILED, PilotState::TIMED_OUT};
    int allowed = 0;
    for (auto from : all) {
      for (auto to : all) allowed += transition_allowed(from, to) ? 1 : 0;
    }
    CHECK(allowed == 6);
    CHECK(transition_allowed(PilotState::SUBMITTED, PilotState::QUEUED));
    CHECK(transition_allowed(PilotState::QUEUED, PilotState::RUNNING));
    CHECK(transition_allowed(PilotState::QUEUED, PilotState::FAILED));
    CHECK(transition_allowed(PilotState::RUNNING, PilotState::TIMED_OUT));
    CHECK_FALSE(transition_allowed(PilotState::QUEUED, PilotState::COMPLETED));
    CHECK_FALSE(transition_allowed(PilotState::COMPLETED, PilotState::RUNNING));

    PilotRecord p;
    p.pilot_id = format_pilot_id(1);
    p.entry_id = "e1";
    CHECK(p.pilot_id == "p-00000001");
    transition(p, PilotState::QUEUED, 10);
    CHECK_THROWS_AS(transition(p, PilotState::COMPLETED, 11), TransitionError);
    CHECK_THROWS_AS(transition(p, PilotState::RUNNING, 5), TransitionError);
    transition(p, PilotState::RUNNING, 20);
    transition(p, PilotState::COMPLETED, 30);
    CHECK(*p.submitted_at == 10);
    CHECK(*p.started_at == 20);
    CHECK(*p.finished_at == 30);
    CHECK(validate_pilot_record(p).empty());
  }

  TEST_CASE("benchmark result invariants") {
    BenchmarkResult r = testing::sample_result();
    CHECK(validate_benchmark_result(r).empty());
    r.score = 0;
    CHECK_FALSE(validate_benchmark_result(r).empty());
    r = testing::sample_result();
    BenchmarkSpec spec{"s1", "s1", "", 1000, 10};
    CHECK_FALSE(validate_benchmark_result(r, &spec).empty());  // 20 s > 10 s timeout
    spec.timeout_s = 20;
    CHECK(validate_benchmark_result(r, &spec).empty());
  }
}
