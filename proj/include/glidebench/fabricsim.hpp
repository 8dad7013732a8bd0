#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "glidebench/domain.hpp"
#include "glidebench/rng.hpp"

namespace glidebench {

// Hidden simulation ground truth for one entry. Never exposed through the
// factory, the API, or the result store.
struct FabricProfile {
  std::string entry_id;
  double true_perf = 1.0;  // work-units/second
  double perf_noise_cv = 0.0;
  double queue_delay_median_s = 0.0;
  double queue_delay_sigma = 0.0;
  double failure_prob = 0.0;
  // Node descriptor a pilot sees when it lands on this entry.
  std::optional<NodeDescriptor> node;

  bool operator==(const FabricProfile&) const = default;
};

std::vector<std::string> validate_fabric_profile(const FabricProfile& profile);

// median * exp(sigma * z), z ~ N(0, 1). sigma == 0 returns the median and
// consumes no draws.
double sample_queue_delay(const FabricProfile& profile, RngStream& rng);

struct RunOutcome {
  bool success = false;
  bool timed_out = false;
  double measured_score = 0.0;  // 0 when the payload failed before measuring
  double duration_s = 0.0;      // nominal payload duration, may exceed timeout
};

// One benchmark run on the entry. The failure draw comes from `fail_rng` and
// the noise draw from `perf_rng`; both are always consumed so a stream's
// position depends only on how many runs happened on that entry.
RunOutcome sample_run_outcome(const FabricProfile& profile, const BenchmarkSpec& spec,
                              RngStream& fail_rng, RngStream& perf_rng);

enum class EventKind { PILOT_START, PILOT_FINISH, FACTORY_CYCLE, RUNNER_WAKE };

std::string_view to_string(EventKind kind);

struct SimEvent {
  SimTime time = 0.0;
  std::uint64_t seq = 0;
  EventKind kind = EventKind::FACTORY_CYCLE;
  std::string pilot_id;  // PILOT_START / PILOT_FINISH only

  bool operator==(const SimEvent&) const = default;
};

// Min-queue on (time, seq). seq is assigned on push, strictly increasing.
class EventQueue {
 public:
  // Returns the assigned seq. Scheduling before the current clock throws.
  std::uint64_t push(SimTime time, EventKind kind, std::string pilot_id = {});

  // Removes and returns the minimal event; nullopt means the simulation has
  // drained.
  std::optional<SimEvent> advance();

  const SimEvent* peek() const;
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }
  SimTime now() const { return now_; }

 private:
  struct Later {
    bool operator()(const SimEvent& a, const SimEvent& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
  std::uint64_t next_seq_ = 1;
  SimTime now_ = 0.0;
};

}  // namespace glidebench
