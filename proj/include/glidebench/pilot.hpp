#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glidebench/benchharness.hpp"
#include "glidebench/domain.hpp"

namespace glidebench {

inline constexpr std::string_view kBlockBegin = "=GLIDEBENCH:BEGIN v1=";
inline constexpr std::string_view kEndPrefix = "=GLIDEBENCH:END ";
inline constexpr std::string_view kErrorPrefix = "GLIDEBENCH:ERROR ";

struct PilotContext {
  std::string pilot_id;
  std::string entry_id;
  PilotPurpose purpose = PilotPurpose::user;
  std::optional<BenchmarkSpec> spec;
  // Node environment; resolved by detect_resources during the run.
  std::optional<NodeDescriptor> node;
  bool container_available = true;
  SimTime started_at = 0.0;
};

struct PilotOutcome {
  PilotState terminal = PilotState::FAILED;
  std::vector<std::string> stderr_lines;
  double payload_s = 0.0;  // simulated time spent before reaching terminal
  NodeInfo node;
  std::optional<BenchmarkResult> result;
};

// validate -> detect_resources -> payload -> report. Never throws for payload
// problems: they become the terminal state plus a GLIDEBENCH:ERROR line.
// User pilots run a no-op payload and complete immediately.
PilotOutcome run(const PilotContext& ctx, Executor& executor);

NodeInfo detect_resources(const std::optional<NodeDescriptor>& descriptor);

// Exactly three lines: BEGIN sentinel, single-line JSON payload, and
// "=GLIDEBENCH:END <sha256 of payload>=".
std::vector<std::string> emit_result_block(const BenchmarkResult& result);

}  // namespace glidebench
