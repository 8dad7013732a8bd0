#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace glidebench {

// Seconds on the simulation clock, epoch 0 at scenario start.
using SimTime = double;

struct EntryConfig {
  std::string entry_id;
  std::string site_name;
  std::string cpu_model;
  double price_per_hour = 0.0;
  std::int64_t max_pilots = 0;
  bool supports_containers = true;
  bool enabled = true;

  bool operator==(const EntryConfig&) const = default;
};

struct NodeInfo {
  std::int64_t cores = 1;
  std::int64_t memory_mb = 1;
  std::int64_t disk_mb = 0;
  std::int64_t gpus = 0;
  std::string cpu_model = "unknown";

  bool operator==(const NodeInfo&) const = default;
};

// What the fabric node exposes to a landing pilot; any field may be missing.
struct NodeDescriptor {
  std::optional<std::int64_t> cores;
  std::optional<std::int64_t> memory_mb;
  std::optional<std::int64_t> disk_mb;
  std::optional<std::int64_t> gpus;
  std::optional<std::string> cpu_model;

  bool operator==(const NodeDescriptor&) const = default;
};

enum class PilotPurpose { user, benchmark };

enum class PilotState { SUBMITTED, QUEUED, RUNNING, COMPLETED, FAILED, TIMED_OUT };

struct PilotRecord {
  std::string pilot_id;
  std::string entry_id;
  PilotPurpose purpose = PilotPurpose::user;
  std::optional<std::string> spec_id;
  PilotState state = PilotState::SUBMITTED;
  std::optional<SimTime> submitted_at;
  std::optional<SimTime> started_at;
  std::optional<SimTime> finished_at;
  std::vector<std::string> stderr_lines;

  bool operator==(const PilotRecord&) const = default;
};

struct BenchmarkSpec {
  std::string spec_id;
  std::string name;
  std::string image_ref;
  std::int64_t work_units = 1;
  std::int64_t timeout_s = 1;

  bool operator==(const BenchmarkSpec&) const = default;
};

inline constexpr int kResultSchemaVersion = 1;

struct BenchmarkResult {
  int schema_version = kResultSchemaVersion;
  std::string pilot_id;
  std::string entry_id;
  std::string spec_id;
  double score = 0.0;
  double duration_s = 0.0;
  SimTime started_at = 0.0;
  NodeInfo node;
  int exit_code = 0;

  bool operator==(const BenchmarkResult&) const = default;
};

// Thrown when a pilot transition is requested along an edge that is not in
// the lifecycle graph.
class TransitionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

std::string_view to_string(PilotState state);
std::string_view to_string(PilotPurpose purpose);
std::optional<PilotState> parse_pilot_state(std::string_view text);
std::optional<PilotPurpose> parse_pilot_purpose(std::string_view text);

bool is_terminal(PilotState state);
bool is_live(PilotState state);  // QUEUED or RUNNING

// SUBMITTED->QUEUED->RUNNING->{COMPLETED,FAILED,TIMED_OUT}, plus QUEUED->FAILED.
bool transition_allowed(PilotState from, PilotState to);

// Applies a state change with its timestamp. Throws TransitionError on an
// illegal edge or a timestamp that would run backwards.
void transition(PilotRecord& pilot, PilotState to, SimTime now);

// Every invariant of PilotRecord that can be checked on a snapshot.
std::vector<std::string> validate_pilot_record(const PilotRecord& pilot);

std::vector<std::string> validate_entry_config(const EntryConfig& cfg);
std::vector<std::string> validate_node_info(const NodeInfo& node);
std::vector<std::string> validate_benchmark_spec(const BenchmarkSpec& spec);

// Checks the result's own invariants. The duration-vs-timeout rule only
// applies when the spec is supplied.
std::vector<std::string> validate_benchmark_result(const BenchmarkResult& result,
                                                   const BenchmarkSpec* spec = nullptr);

bool is_valid_entry_id(std::string_view id);

// Lowercase, trim, and collapse internal whitespace runs to one space.
std::string hardware_fingerprint(std::string_view cpu_model);

// "p-00000042"
std::string format_pilot_id(std::uint64_t seq);

}  // namespace glidebench
