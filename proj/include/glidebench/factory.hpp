#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glidebench/codec.hpp"
#include "glidebench/domain.hpp"

namespace glidebench {

struct FactoryConfig {
  std::int64_t version = 1;
  std::vector<EntryConfig> entries;
  bool benchmarks_enabled = false;
  double cycle_period_s = 60.0;
  std::int64_t max_submit_per_cycle = 100;

  const EntryConfig* find(std::string_view entry_id) const;
  bool operator==(const FactoryConfig&) const = default;
};

// Parses and validates an input document (keys: entries, benchmarks_enabled,
// cycle_period_s, max_submit_per_cycle). Throws ParseError or ValidationError
// listing every violation. The result has version 1.
FactoryConfig load_config(std::string_view document);
FactoryConfig config_from_json(const ordered_json& document);

std::vector<std::string> validate_factory_config(const FactoryConfig& cfg);

// The input document form (no version key), suitable for reconfig.
ordered_json config_input_json(const FactoryConfig& cfg);
// The active-config view: version first, then the input keys.
ordered_json config_json(const FactoryConfig& cfg);

struct PressureRequest {
  std::string client_id;
  std::string entry_id;
  std::int64_t requested = 0;
};

struct Submission {
  std::string entry_id;
  std::int64_t count = 0;

  bool operator==(const Submission&) const = default;
};

enum class MessageKind { pressure_request, status_report, campaign_notice };

std::string_view to_string(MessageKind kind);

struct MailboxMessage {
  std::string msg_id;  // assigned by the factory when empty
  std::string from;
  std::string to;
  MessageKind kind = MessageKind::status_report;
  std::string body;  // opaque JSON text
  SimTime posted_at = 0.0;

  bool operator==(const MailboxMessage&) const = default;
};

struct PilotFilter {
  std::optional<std::string> entry_id;
  std::optional<PilotPurpose> purpose;
  std::vector<PilotState> states;  // empty matches every state
};

inline constexpr std::string_view kFactoryMailbox = "factory";

// Pressure-based pilot factory.
//
// Not internally synchronized: callers serialize commands and queries onto one
// timeline (the simulation driver and the API service both hold a lock).
class Factory {
 public:
  // Invoked once per new pilot, right after it enters QUEUED, so the owner can
  // sample a queue delay and schedule the start.
  using QueuedHook = std::function<void(const PilotRecord&)>;

  Factory(FactoryConfig config, std::vector<BenchmarkSpec> specs);

  const FactoryConfig& config() const { return config_; }
  const std::vector<BenchmarkSpec>& specs() const { return specs_; }
  const BenchmarkSpec* find_spec(std::string_view spec_id) const;

  void set_queued_hook(QueuedHook hook) { on_queued_ = std::move(hook); }

  // Atomic swap; returns the new version. On failure the old config stays.
  std::int64_t reconfig(std::string_view document);
  std::int64_t reconfig(FactoryConfig next);

  // Throws Rejection("unknown_entry" | "entry_disabled" | "invalid_request").
  void set_pressure(const std::string& client_id, const std::string& entry_id,
                    std::int64_t requested);
  std::int64_t total_requested(std::string_view entry_id) const;
  std::vector<PressureRequest> pressure_requests() const;

  // Applies pending pressure_request mail, then fills per-entry deficits.
  std::vector<Submission> cycle(SimTime now);

  // Throws Rejection("unknown_entry" | "entry_disabled" | "benchmarks_disabled" |
  // "unknown_spec" | "entry_full" | "invalid_request").
  std::string submit_single(const std::string& entry_id, PilotPurpose purpose,
                            const std::optional<std::string>& spec_id, SimTime now);

  std::vector<PilotRecord> query_pilots(const PilotFilter& filter = {}) const;
  // Visits every pilot in pilot_id order without copying.
  void visit_pilots(const std::function<void(const PilotRecord&)>& fn) const;
  const PilotRecord& pilot(std::string_view pilot_id) const;  // throws NotFound
  // Entry parameters captured when the pilot was submitted.
  const EntryConfig& pilot_entry(std::string_view pilot_id) const;

  void mark_running(std::string_view pilot_id, SimTime now);
  void mark_finished(std::string_view pilot_id, PilotState terminal, SimTime now,
                     std::vector<std::string> stderr_lines);

  std::int64_t queued(std::string_view entry_id) const;
  std::int64_t running(std::string_view entry_id) const;
  std::int64_t in_flight(std::string_view entry_id) const { return queued(entry_id) + running(entry_id); }
  std::int64_t live_benchmarks() const { return live_benchmarks_; }
  std::int64_t benchmark_count(PilotState state) const;

  std::string mailbox_post(MailboxMessage msg);
  std::vector<MailboxMessage> mailbox_fetch(const std::string& recipient);

 private:
  struct Tracked {
    PilotRecord record;
    EntryConfig entry;
  };
  struct Counts {
    std::int64_t queued = 0;
    std::int64_t running = 0;
  };

  Tracked& tracked(std::string_view pilot_id);
  const Tracked& tracked(std::string_view pilot_id) const;
  std::string create_pilot(const EntryConfig& entry, PilotPurpose purpose,
                           const std::optional<std::string>& spec_id, SimTime now);
  void adjust_counts(const PilotRecord& pilot, PilotState from, PilotState to);
  void process_mail(SimTime now);

  FactoryConfig config_;
  std::vector<BenchmarkSpec> specs_;
  std::map<std::string, Tracked, std::less<>> pilots_;
  std::map<std::string, Counts, std::less<>> counts_;
  // (client_id, entry_id) -> requested
  std::map<std::pair<std::string, std::string>, std::int64_t> pressure_;
  std::map<std::string, std::deque<MailboxMessage>, std::less<>> mailboxes_;
  std::map<PilotState, std::int64_t> benchmark_states_;
  std::uint64_t next_pilot_seq_ = 1;
  std::uint64_t next_msg_seq_ = 1;
  std::int64_t live_benchmarks_ = 0;
  QueuedHook on_queued_;
};

}  // namespace glidebench
