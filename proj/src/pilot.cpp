#include "glidebench/pilot.hpp"

#include <algorithm>

#include "glidebench/checksum.hpp"
#include "glidebench/codec.hpp"

namespace glidebench {

namespace {

std::string error_line(std::string_view reason) {
  return std::string(kErrorPrefix) + std::string(reason);
}

PilotOutcome fail(PilotOutcome out, PilotState terminal, std::string_view reason) {
  out.terminal = terminal;
  out.stderr_lines.push_back(error_line(reason));
  return out;
}

}  // namespace

NodeInfo detect_resources(const std::optional<NodeDescriptor>& descriptor) {
  NodeInfo n;
  if (!descriptor) return n;
  if (descriptor->cores) n.cores = *descriptor->cores;
  if (descriptor->memory_mb) n.memory_mb = *descriptor->memory_mb;
  if (descriptor->disk_mb) n.disk_mb = *descriptor->disk_mb;
  if (descriptor->gpus) n.gpus = *descriptor->gpus;
  if (descriptor->cpu_model) n.cpu_model = *descriptor->cpu_model;
  return n;
}

std::vector<std::string> emit_result_block(const BenchmarkResult& result) {
  std::string payload = result_payload_line(result);
  std::string end = std::string(kEndPrefix) + sha256_hex(payload) + "=";
  return {std::string(kBlockBegin), std::move(payload), std::move(end)};
}

PilotOutcome run(const PilotContext& ctx, Executor& executor) {
  PilotOutcome out;
  out.stderr_lines.push_back("glidein " + ctx.pilot_id + " starting on entry " + ctx.entry_id);

  if (ctx.purpose == PilotPurpose::benchmark) {
    if (!ctx.spec) return fail(std::move(out), PilotState::FAILED, "missing_spec");
    if (!ctx.spec->image_ref.empty() && !ctx.container_available) {
      return fail(std::move(out), PilotState::FAILED, "container_unavailable");
    }
  }

  out.node = detect_resources(ctx.node);
  if (auto bad = validate_node_info(out.node); !bad.empty()) {
    return fail(std::move(out), PilotState::FAILED, "node_invalid " + bad.front());
  }
  out.stderr_lines.push_back("detected cores=" + std::to_string(out.node.cores) +
                             " memory_mb=" + std::to_string(out.node.memory_mb) +
                             " disk_mb=" + std::to_string(out.node.disk_mb) +
                             " gpus=" + std::to_string(out.node.gpus) + " cpu_model=\"" +
                             out.node.cpu_model + "\"");

  if (ctx.purpose == PilotPurpose::user) {
    out.stderr_lines.push_back("user payload: no-op");
    out.terminal = PilotState::COMPLETED;
    return out;
  }

  const BenchmarkSpec& spec = *ctx.spec;
  out.stderr_lines.push_back("running benchmark " + spec.spec_id + " image=" + spec.image_ref +
                             " work_units=" + std::to_string(spec.work_units));
  const RawMeasurement m = execute(spec, executor);
  out.payload_s = m.elapsed_s;

  if (m.exit_code == kExitTimeout) {
    out.payload_s = std::min(m.elapsed_s, static_cast<double>(spec.timeout_s));
    return fail(std::move(out), PilotState::TIMED_OUT,
                "timeout after " + std::to_string(spec.timeout_s) + "s completed_units=" +
                    std::to_string(m.completed_units));
  }
  const auto score = compute_score(m, spec);
  if (!score) {
    return fail(std::move(out), PilotState::FAILED,
                "payload_failed exit_code=" + std::to_string(m.exit_code));
  }

  BenchmarkResult r;
  r.pilot_id = ctx.pilot_id;
  r.entry_id = ctx.entry_id;
  r.spec_id = spec.spec_id;
  r.score = *score;
  r.duration_s = m.elapsed_s;
  r.started_at = ctx.started_at;
  r.node = out.node;
  r.exit_code = m.exit_code;
  for (auto& line : emit_result_block(r)) out.stderr_lines.push_back(std::move(line));
  out.result = std::move(r);
  out.terminal = PilotState::COMPLETED;
  return out;
}

}  // namespace glidebench
