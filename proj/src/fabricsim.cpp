#include "glidebench/fabricsim.hpp"

#include <cmath>
#include <stdexcept>

namespace glidebench {

std::vector<std::string> validate_fabric_profile(const FabricProfile& p) {
  std::vector<std::string> out;
  if (!(p.true_perf > 0.0)) out.emplace_back("true_perf must be > 0");
  if (!(p.perf_noise_cv >= 0.0)) out.emplace_back("perf_noise_cv negative");
  if (!(p.queue_delay_median_s >= 0.0)) out.emplace_back("queue_delay_median_s negative");
  if (!(p.queue_delay_sigma >= 0.0)) out.emplace_back("queue_delay_sigma negative");
  if (!(p.failure_prob >= 0.0 && p.failure_prob <= 1.0)) {
    out.emplace_back("failure_prob outside [0,1]");
  }
  return out;
}

double sample_queue_delay(const FabricProfile& profile, RngStream& rng) {
  if (profile.queue_delay_sigma == 0.0) return profile.queue_delay_median_s;
  return profile.queue_delay_median_s * std::exp(profile.queue_delay_sigma * rng.normal());
}

RunOutcome sample_run_outcome(const FabricProfile& profile, const BenchmarkSpec& spec,
                              RngStream& fail_rng, RngStream& perf_rng) {
  const bool failed = fail_rng.uniform() < profile.failure_prob;
  const double z = perf_rng.normal();

  RunOutcome out;
  if (failed) return out;

  double multiplier = 1.0;
  if (profile.perf_noise_cv > 0.0) {
    // Lognormal with unit mean and coefficient of variation perf_noise_cv.
    const double sigma = std::sqrt(std::log1p(profile.perf_noise_cv * profile.perf_noise_cv));
    multiplier = std::exp(sigma * z - 0.5 * sigma * sigma);
  }
  out.measured_score = profile.true_perf * multiplier;
  out.duration_s = static_cast<double>(spec.work_units) / out.measured_score;
  if (out.duration_s > static_cast<double>(spec.timeout_s)) {
    out.timed_out = true;
    return out;
  }
  out.success = true;
  return out;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::PILOT_START:
      return "PILOT_START";
    case EventKind::PILOT_FINISH:
      return "PILOT_FINISH";
    case EventKind::FACTORY_CYCLE:
      return "FACTORY_CYCLE";
    case EventKind::RUNNER_WAKE:
      return "RUNNER_WAKE";
  }
  return "UNKNOWN";
}

std::uint64_t EventQueue::push(SimTime time, EventKind kind, std::string pilot_id) {
  if (time < now_) throw std::logic_error("event scheduled in the past");
  const std::uint64_t seq = next_seq_++;
  heap_.push(SimEvent{time, seq, kind, std::move(pilot_id)});
  return seq;
}

std::optional<SimEvent> EventQueue::advance() {
  if (heap_.empty()) return std::nullopt;
  SimEvent ev = heap_.top();
  heap_.pop();
  now_ = ev.time;
  return ev;
}

const SimEvent* EventQueue::peek() const { return heap_.empty() ? nullptr : &heap_.top(); }

}  // namespace glidebench
