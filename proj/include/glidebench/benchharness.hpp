#pragma once

#include <cstdint>
#include <optional>

#include "glidebench/domain.hpp"
#include "glidebench/fabricsim.hpp"
#include "glidebench/rng.hpp"

namespace glidebench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPayloadFailed = 1;
inline constexpr int kExitTimeout = 124;

struct RawMeasurement {
  double elapsed_s = 0.0;
  std::int64_t completed_units = 0;
  int exit_code = kExitOk;
  // Throughput the executor observed directly, when it has one. The simulated
  // executor sets it so a noiseless run reports true_perf bit-for-bit instead
  // of work_units / (work_units / true_perf).
  std::optional<double> observed_rate;
};

class Executor {
 public:
  virtual ~Executor() = default;
  virtual RawMeasurement execute(const BenchmarkSpec& spec) = 0;
};

// Delegates to the fabric simulator. Failures finish instantly with no
// completed units; timeouts stop at timeout_s with the units done by then.
class SimulatedExecutor final : public Executor {
 public:
  SimulatedExecutor(const FabricProfile& profile, RngStream& fail_rng, RngStream& perf_rng)
      : profile_(profile), fail_rng_(fail_rng), perf_rng_(perf_rng) {}

  RawMeasurement execute(const BenchmarkSpec& spec) override;

 private:
  const FabricProfile& profile_;
  RngStream& fail_rng_;
  RngStream& perf_rng_;
};

// Runs the reference CPU kernel on this machine and times it with a steady
// clock. One work unit is kLocalKernelIterations rounds of
//   x = x * 6364136223846793005 + 1442695040888963407;  x ^= x >> 29;
// over a 64-bit state seeded with the unit index. A development aid for
// sanity-checking the pipeline on real hardware.
class LocalExecutor final : public Executor {
 public:
  static constexpr std::uint64_t kLocalKernelIterations = 1U << 15;

  RawMeasurement execute(const BenchmarkSpec& spec) override;
};

RawMeasurement execute(const BenchmarkSpec& spec, Executor& executor);

// work_units / elapsed_s (or the observed rate when present); nullopt when the
// run failed or elapsed_s <= 0.
std::optional<double> compute_score(const RawMeasurement& m, const BenchmarkSpec& spec);

}  // namespace glidebench
