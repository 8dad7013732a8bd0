#include "glidebench/benchharness.hpp"

#include <chrono>
#include <cmath>

namespace glidebench {

RawMeasurement SimulatedExecutor::execute(const BenchmarkSpec& spec) {
  const RunOutcome outcome = sample_run_outcome(profile_, spec, fail_rng_, perf_rng_);
  RawMeasurement m;
  if (outcome.success) {
    m.elapsed_s = outcome.duration_s;
    m.completed_units = spec.work_units;
    m.exit_code = kExitOk;
    m.observed_rate = outcome.measured_score;
  } else if (outcome.timed_out) {
    m.elapsed_s = static_cast<double>(spec.timeout_s);
    m.completed_units = static_cast<std::int64_t>(
        std::floor(static_cast<double>(spec.timeout_s) * outcome.measured_score));
    if (m.completed_units >= spec.work_units) m.completed_units = spec.work_units - 1;
    m.exit_code = kExitTimeout;
  } else {
    m.exit_code = kExitPayloadFailed;
  }
  return m;
}

RawMeasurement LocalExecutor::execute(const BenchmarkSpec& spec) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const double timeout = static_cast<double>(spec.timeout_s);
  volatile std::uint64_t sink = 0;

  RawMeasurement m;
  for (std::int64_t unit = 0; unit < spec.work_units; ++unit) {
    std::uint64_t x = static_cast<std::uint64_t>(unit);
    for (std::uint64_t i = 0; i < kLocalKernelIterations; ++i) {
      x = x * 6364136223846793005ULL + 1442695040888963407ULL;
      x ^= x >> 29;
    }
    sink = sink + x;
    m.completed_units = unit + 1;
    m.elapsed_s = std::chrono::duration<double>(clock::now() - start).count();
    if (m.elapsed_s > timeout && m.completed_units < spec.work_units) {
      m.exit_code = kExitTimeout;
      return m;
    }
  }
  m.exit_code = kExitOk;
  return m;
}

RawMeasurement execute(const BenchmarkSpec& spec, Executor& executor) {
  return executor.execute(spec);
}

std::optional<double> compute_score(const RawMeasurement& m, const BenchmarkSpec& spec) {
  if (m.exit_code != kExitOk || !(m.elapsed_s > 0.0)) return std::nullopt;
  if (m.observed_rate) return *m.observed_rate;
  return static_cast<double>(spec.work_units) / m.elapsed_s;
}

}  // namespace glidebench
