#include <doctest.h>

#include <cmath>

#include "glidebench/fabricsim.hpp"
#include "glidebench/rng.hpp"

using namespace glidebench;

TEST_SUITE("rng") {
  TEST_CASE("xoshiro256** stream matches the reference implementation") {
    // Frozen from an independent Python transcription of the documented algorithm.
    CHECK(fnv1a64("delay/e42") == 0x13e687fefa8dfc3aULL);
    RngStream r(42, "delay/e42");
    CHECK(r.next() == 12039501193992415252ULL);
    CHECK(r.next() == 7901468375672313438ULL);
    CHECK(r.next() == 17389904648522502181ULL);
    RngStream z(0, "");
    CHECK(z.next() == 2393714812739481704ULL);
    CHECK(z.next() == 6581096415885975394ULL);
    RngStream u(42, "delay/e42");
    CHECK(u.uniform() == 0.6526626675084201);
  }

  TEST_CASE("labels give independent streams") {
    RngStream a(1, "perf/e1"), b(1, "perf/e2"), c(1, "perf/e1");
    const auto x = a.next();
    CHECK(x != b.next());
    CHECK(x == c.next());
  }
}

TEST_SUITE("fabricsim") {
  BenchmarkSpec spec1000() { return {"s1", "s1", "", 1000, 100}; }

  TEST_CASE("queue delay examples") {
    FabricProfile p{"e1", 50, 0, 300, 0, 0, std::nullopt};
    RngStream rng(1, "delay/e1");
    CHECK(sample_queue_delay(p, rng) == 300.0);
    p.queue_delay_median_s = 0;
    p.queue_delay_sigma = 1.5;
    CHECK(sample_queue_delay(p, rng) == 0.0);
    p.queue_delay_median_s = 300;
    p.queue_delay_sigma = 0.5;
    RngStream r1(9, "delay/e1"), r2(9, "delay/e1");
    const double d = sample_queue_delay(p, r1);
    CHECK(d == sample_queue_delay(p, r2));
    CHECK(d > 0);
  }

  TEST_CASE("run outcome examples") {
    RngStream f(1, "fail/e1"), q(1, "perf/e1");
    FabricProfile fail{"e1", 50, 0, 0, 0, 1.0, std::nullopt};
    CHECK_FALSE(sample_run_outcome(fail, spec1000(), f, q).success);

    FabricProfile clean{"e1", 50, 0, 0, 0, 0, std::nullopt};
    const auto o = sample_run_outcome(clean, spec1000(), f, q);
    CHECK(o.success);
    CHECK(o.measured_score == 50.0);
    CHECK(o.duration_s == 20.0);

    FabricProfile slow{"e1", 5, 0, 0, 0, 0, std::nullopt};
    const auto t = sample_run_outcome(slow, spec1000(), f, q);
    CHECK_FALSE(t.success);
    CHECK(t.timed_out);
  }

  TEST_CASE("noisy score mean and multiplier are unbiased") {
    FabricProfile p{"e1", 80, 0.1, 0, 0, 0, std::nullopt};
    BenchmarkSpec spec{"s1", "s1", "", 1000, 1000000};
    RngStream f(2024, "fail/e1"), q(2024, "perf/e1");
    const int n = 10000;
    double sum = 0, sumsq = 0;
    for (int i = 0; i < n; ++i) {
      const auto o = sample_run_outcome(p, spec, f, q);
      REQUIRE(o.success);
      const double m = o.measured_score / p.true_perf;
      sum += m;
      sumsq += m * m;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sumsq - n * mean * mean) / (n - 1));
    CHECK(std::fabs(mean - 1.0) < 0.01);
    CHECK(std::fabs(mean - 1.0) < 3.0 * sd / std::sqrt(double(n)));
    CHECK(sd == doctest::Approx(0.1).epsilon(0.05));
  }

  TEST_CASE("event queue ordering") {
    EventQueue q;
    q.push(5, EventKind::PILOT_START, "a");  // seq 1
    q.push(5, EventKind::PILOT_START, "b");  // seq 2
    q.push(3, EventKind::PILOT_START, "c");  // seq 3
    auto e = q.advance();
    CHECK(e->time == 3);
    CHECK(e->pilot_id == "c");
    e = q.advance();
    CHECK(e->pilot_id == "a");
    CHECK(e->seq < q.peek()->seq);
    // Inserted at the current time: after the earlier-seq event at t=5.
    q.push(5, EventKind::PILOT_FINISH, "d");
    CHECK(q.advance()->pilot_id == "b");
    CHECK(q.advance()->pilot_id == "d");
    CHECK_FALSE(q.advance().has_value());
    CHECK_THROWS(q.push(1, EventKind::RUNNER_WAKE));
  }
}
