#include "glidebench/domain.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <utility>

namespace glidebench {

namespace {

constexpr std::array<std::pair<PilotState, std::string_view>, 6> kStateNames{{
    {PilotState::SUBMITTED, "SUBMITTED"},
    {PilotState::QUEUED, "QUEUED"},
    {PilotState::RUNNING, "RUNNING"},
    {PilotState::COMPLETED, "COMPLETED"},
    {PilotState::FAILED, "FAILED"},
    {PilotState::TIMED_OUT, "TIMED_OUT"},
}};

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string_view to_string(PilotState state) {
  for (const auto& [s, name] : kStateNames) {
    if (s == state) return name;
  }
  return "UNKNOWN";
}

std::string_view to_string(PilotPurpose purpose) {
  return purpose == PilotPurpose::benchmark ? "benchmark" : "user";
}

std::optional<PilotState> parse_pilot_state(std::string_view text) {
  for (const auto& [s, name] : kStateNames) {
    if (name == text) return s;
  }
  return std::nullopt;
}

std::optional<PilotPurpose> parse_pilot_purpose(std::string_view text) {
  if (text == "user") return PilotPurpose::user;
  if (text == "benchmark") return PilotPurpose::benchmark;
  return std::nullopt;
}

bool is_terminal(PilotState state) {
  return state == PilotState::COMPLETED || state == PilotState::FAILED ||
         state == PilotState::TIMED_OUT;
}

bool is_live(PilotState state) {
  return state == PilotState::QUEUED || state == PilotState::RUNNING;
}

bool transition_allowed(PilotState from, PilotState to) {
  switch (from) {
    case PilotState::SUBMITTED:
      return to == PilotState::QUEUED;
    case PilotState::QUEUED:
      return to == PilotState::RUNNING || to == PilotState::FAILED;
    case PilotState::RUNNING:
      return is_terminal(to);
    default:
      return false;
  }
}

void transition(PilotRecord& pilot, PilotState to, SimTime now) {
  if (!transition_allowed(pilot.state, to)) {
    throw TransitionError("illegal pilot transition " + std::string(to_string(pilot.state)) +
                          " -> " + std::string(to_string(to)) + " for " + pilot.pilot_id);
  }
  const SimTime floor = pilot.started_at ? *pilot.started_at
                        : pilot.submitted_at ? *pilot.submitted_at
                                             : now;
  if (now < floor) {
    throw TransitionError("timestamp runs backwards for " + pilot.pilot_id);
  }
  switch (to) {
    case PilotState::QUEUED:
      if (!pilot.submitted_at) pilot.submitted_at = now;
      break;
    case PilotState::RUNNING:
      pilot.started_at = now;
      break;
    default:
      pilot.finished_at = now;
      break;
  }
  pilot.state = to;
}

std::vector<std::string> validate_pilot_record(const PilotRecord& pilot) {
  std::vector<std::string> out;
  if (pilot.pilot_id.empty()) out.emplace_back("pilot_id empty");
  if (pilot.entry_id.empty()) out.emplace_back("entry_id empty");
  if ((pilot.purpose == PilotPurpose::benchmark) != pilot.spec_id.has_value()) {
    out.emplace_back("spec_id must be present iff purpose is benchmark");
  }
  if (pilot.submitted_at && pilot.started_at && *pilot.submitted_at > *pilot.started_at) {
    out.emplace_back("submitted_at after started_at");
  }
  if (pilot.started_at && pilot.finished_at && *pilot.started_at > *pilot.finished_at) {
    out.emplace_back("started_at after finished_at");
  }
  if (pilot.submitted_at && pilot.finished_at && *pilot.submitted_at > *pilot.finished_at) {
    out.emplace_back("submitted_at after finished_at");
  }
  switch (pilot.state) {
    case PilotState::SUBMITTED:
    case PilotState::QUEUED:
      if (pilot.started_at) out.emplace_back("started_at set before RUNNING");
      if (pilot.finished_at) out.emplace_back("finished_at set on live pilot");
      break;
    case PilotState::RUNNING:
      if (!pilot.started_at) out.emplace_back("RUNNING without started_at");
      if (pilot.finished_at) out.emplace_back("finished_at set on live pilot");
      break;
    case PilotState::COMPLETED:
    case PilotState::TIMED_OUT:
      if (!pilot.started_at) out.emplace_back("terminal after run without started_at");
      [[fallthrough]];
    case PilotState::FAILED:
      if (!pilot.finished_at) out.emplace_back("terminal without finished_at");
      break;
  }
  return out;
}

bool is_valid_entry_id(std::string_view id) {
  if (id.empty()) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '.' ||
                    c == '-';
    if (!ok) return false;
  }
  return true;
}

std::vector<std::string> validate_entry_config(const EntryConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.entry_id.empty()) {
    out.emplace_back("entry_id empty");
  } else if (!is_valid_entry_id(cfg.entry_id)) {
    out.emplace_back("entry_id '" + cfg.entry_id + "' has characters outside [a-z0-9_.-]");
  }
  if (!(cfg.price_per_hour >= 0.0)) out.emplace_back("price_per_hour negative");
  if (cfg.max_pilots < 0) out.emplace_back("max_pilots negative");
  return out;
}

std::vector<std::string> validate_node_info(const NodeInfo& node) {
  std::vector<std::string> out;
  if (node.cores < 1) out.emplace_back("cores < 1");
  if (node.memory_mb < 1) out.emplace_back("memory_mb < 1");
  if (node.disk_mb < 0) out.emplace_back("disk_mb negative");
  if (node.gpus < 0) out.emplace_back("gpus negative");
  return out;
}

std::vector<std::string> validate_benchmark_spec(const BenchmarkSpec& spec) {
  std::vector<std::string> out;
  if (spec.spec_id.empty()) out.emplace_back("spec_id empty");
  if (spec.work_units < 1) out.emplace_back("work_units < 1");
  if (spec.timeout_s < 1) out.emplace_back("timeout_s < 1");
  return out;
}

std::vector<std::string> validate_benchmark_result(const BenchmarkResult& result,
                                                   const BenchmarkSpec* spec) {
  std::vector<std::string> out;
  if (result.schema_version != kResultSchemaVersion) out.emplace_back("unsupported schema_version");
  if (result.pilot_id.empty()) out.emplace_back("pilot_id empty");
  if (result.entry_id.empty()) out.emplace_back("entry_id empty");
  if (result.spec_id.empty()) out.emplace_back("spec_id empty");
  if ((result.score > 0.0) != (result.exit_code == 0)) {
    out.emplace_back("score must be positive iff exit_code is 0");
  }
  if (!(result.duration_s > 0.0)) out.emplace_back("duration_s not positive");
  if (spec != nullptr && result.exit_code == 0 &&
      result.duration_s > static_cast<double>(spec->timeout_s)) {
    out.emplace_back("duration_s exceeds spec timeout_s");
  }
  for (auto& v : validate_node_info(result.node)) out.push_back("node " + v);
  return out;
}

std::string hardware_fingerprint(std::string_view cpu_model) {
  std::string out;
  out.reserve(cpu_model.size());
  bool pending_space = false;
  for (char c : cpu_model) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string format_pilot_id(std::uint64_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p-%08llu", static_cast<unsigned long long>(seq));
  return buf;
}

}  // namespace glidebench
