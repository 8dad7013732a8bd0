#include <doctest.h>

#include <regex>

#include "glidebench/benchharness.hpp"
#include "glidebench/checksum.hpp"
#include "glidebench/collector.hpp"
#include "glidebench/pilot.hpp"
#include "helpers.hpp"

using namespace glidebench;

namespace {

struct Harness {
  FabricProfile profile;
  RngStream fail{1, "fail/e1"};
  RngStream perf{1, "perf/e1"};
  SimulatedExecutor exec{profile, fail, perf};
  explicit Harness(FabricProfile p) : profile(std::move(p)) {}
};

PilotContext bench_ctx(BenchmarkSpec spec) {
  PilotContext ctx;
  ctx.pilot_id = "p-00000001";
  ctx.entry_id = "e1";
  ctx.purpose = PilotPurpose::benchmark;
  ctx.spec = std::move(spec);
  return ctx;
}

FabricProfile clean(double perf) { return {"e1", perf, 0, 0, 0, 0, std::nullopt}; }

}  // namespace

TEST_SUITE("pilot") {
  TEST_CASE("container gate") {
    Harness h(clean(50));
    auto ctx = bench_ctx({"s1", "s1", "img://ref", 1000, 100});
    ctx.container_available = false;
    const auto out = run(ctx, h.exec);
    CHECK(out.terminal == PilotState::FAILED);
    CHECK(out.stderr_lines.back() == "GLIDEBENCH:ERROR container_unavailable");
  }

  TEST_CASE("noiseless benchmark completes with a result block") {
    Harness h(clean(50));
    const auto out = run(bench_ctx({"s1", "s1", "", 1000, 100}), h.exec);
    CHECK(out.terminal == PilotState::COMPLETED);
    REQUIRE(out.result);
    CHECK(out.result->score == 50.0);
    CHECK(out.result->duration_s == 20.0);
    CHECK(out.payload_s == 20.0);
    const auto n = out.stderr_lines.size();
    REQUIRE(n >= 3);
    CHECK(out.stderr_lines[n - 3] == kBlockBegin);
    const auto parsed = parse_stream(out.stderr_lines);
    REQUIRE(parsed.results.size() == 1);
    CHECK(parsed.results[0] == *out.result);
  }

  TEST_CASE("timeout") {
    Harness h(clean(5));
    const auto out = run(bench_ctx({"s1", "s1", "", 1000, 100}), h.exec);
    CHECK(out.terminal == PilotState::TIMED_OUT);
    CHECK(out.payload_s <= 100.0);
    CHECK(out.stderr_lines.back().rfind("GLIDEBENCH:ERROR timeout", 0) == 0);
  }

  TEST_CASE("payload failure ends with one error line") {
    FabricProfile p = clean(50);
    p.failure_prob = 1.0;
    Harness h(p);
    const auto out = run(bench_ctx({"s1", "s1", "", 1000, 100}), h.exec);
    CHECK(out.terminal == PilotState::FAILED);
    CHECK(out.stderr_lines.back().rfind("GLIDEBENCH:ERROR ", 0) == 0);
    CHECK(parse_stream(out.stderr_lines).results.empty());
  }

  TEST_CASE("detect_resources") {
    NodeDescriptor d{8, 16384, std::nullopt, 2, "AMD EPYC 7763"};
    const NodeInfo n = detect_resources(d);
    CHECK(n.cores == 8);
    CHECK(n.memory_mb == 16384);
    CHECK(n.gpus == 2);
    CHECK(n.disk_mb == 0);
    CHECK(n.cpu_model == "AMD EPYC 7763");
    NodeDescriptor nogpu{4, 100, 5, std::nullopt, "x"};
    CHECK(detect_resources(nogpu).gpus == 0);
    CHECK(detect_resources(std::nullopt) == NodeInfo{});
    CHECK(detect_resources(std::nullopt).cpu_model == "unknown");
  }

  TEST_CASE("result block grammar and checksum") {
    const auto block = emit_result_block(testing::sample_result());
    REQUIRE(block.size() == 3);
    const std::regex sentinel("^=GLIDEBENCH:(BEGIN v1|END [0-9a-f]{64})=$");
    CHECK(std::regex_match(block[0], sentinel));
    CHECK(std::regex_match(block[2], sentinel));
    CHECK(block[1].find('\n') == std::string::npos);
    // hashlib.sha256(payload).hexdigest()
    CHECK(block[2] == "=GLIDEBENCH:END c6dfdebd1764e406667acd6f28aa0dcf69403c249590f2e268c84f5cd649773f=");
    CHECK(sha256_hex(block[1]) == "c6dfdebd1764e406667acd6f28aa0dcf69403c249590f2e268c84f5cd649773f");
  }

  TEST_CASE("user pilot runs a no-op") {
    Harness h(clean(50));
    PilotContext ctx;
    ctx.pilot_id = "p-00000009";
    ctx.entry_id = "e1";
    const auto out = run(ctx, h.exec);
    CHECK(out.terminal == PilotState::COMPLETED);
    CHECK_FALSE(out.result);
  }
}

TEST_SUITE("benchharness") {
  TEST_CASE("simulated executor") {
    Harness h(clean(50));
    const BenchmarkSpec spec{"s1", "s1", "", 1000, 100};
    const auto m = execute(spec, h.exec);
    CHECK(m.elapsed_s == 20.0);
    CHECK(m.completed_units == 1000);
    CHECK(m.exit_code == 0);
    CHECK(*compute_score(m, spec) == 50.0);

    FabricProfile p = clean(50);
    p.failure_prob = 1.0;
    Harness f(p);
    const auto bad = execute(spec, f.exec);
    CHECK(bad.exit_code != 0);
    CHECK(bad.completed_units < 1000);
    CHECK_FALSE(compute_score(bad, spec));
  }

  TEST_CASE("compute_score examples") {
    const BenchmarkSpec spec{"s1", "s1", "", 1000, 2000};
    CHECK(*compute_score({20.0, 1000, 0, std::nullopt}, spec) == 50.0);
    CHECK(*compute_score({1000.0, 1000, 0, std::nullopt}, spec) == 1.0);
    CHECK_FALSE(compute_score({20.0, 1000, 1, std::nullopt}, spec));
    CHECK_FALSE(compute_score({0.0, 1000, 0, std::nullopt}, spec));
    CHECK(*compute_score({10.0, 1000, 0, std::nullopt}, spec) > *compute_score({11.0, 1000, 0, std::nullopt}, spec));
  }

  TEST_CASE("local kernel is repeatable") {
    LocalExecutor local;
    const BenchmarkSpec spec{"local", "local", "", 1000, 600};
    // Warm-up so frequency scaling settles before the compared runs.
    execute(spec, local);
    const auto a = compute_score(execute(spec, local), spec);
    const auto b = compute_score(execute(spec, local), spec);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(std::abs(*a - *b) <= 0.2 * std::max(*a, *b));
  }
}
