#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "glidebench/codec.hpp"
#include "glidebench/factory.hpp"

namespace glidebench {

enum class SamplingMode { all_due, representative_per_class, new_only };

std::string_view to_string(SamplingMode mode);
std::optional<SamplingMode> parse_sampling_mode(std::string_view text);

struct RunnerPolicy {
  double min_interval_s = 86400.0;
  SamplingMode mode = SamplingMode::all_due;
  std::string spec_id;
  std::int64_t max_concurrent_benchmarks = 200;

  bool operator==(const RunnerPolicy&) const = default;
};

std::vector<std::string> validate_runner_policy(const RunnerPolicy& policy);
RunnerPolicy policy_from_json(const ordered_json& j);  // throws ParseError / ValidationError
ordered_json to_json(const RunnerPolicy& policy);

// entry_id -> start time of the most recent benchmark for the policy's spec.
using StartHistory = std::map<std::string, SimTime, std::less<>>;

// Enabled entries never benchmarked for the spec, or whose last start is at
// least min_interval_s ago. Sorted by entry_id.
std::vector<std::string> due_entries(const std::vector<EntryConfig>& entries,
                                     const StartHistory& history, SimTime now,
                                     const RunnerPolicy& policy);

// all_due: unchanged. new_only: never-benchmarked only. representative_per_class:
// the oldest-benchmarked entry of each hardware class (ties by entry_id) plus
// every never-benchmarked entry. Sorted by entry_id.
std::vector<std::string> sample_representatives(const std::vector<std::string>& due,
                                                const std::map<std::string, std::string>& fingerprints,
                                                const StartHistory& history,
                                                const RunnerPolicy& policy);

struct TerminalCounts {
  std::int64_t completed = 0;
  std::int64_t failed = 0;
  std::int64_t timed_out = 0;

  bool operator==(const TerminalCounts&) const = default;
};

struct CampaignRecord {
  std::string campaign_id;
  SimTime created_at = 0.0;
  RunnerPolicy policy;
  std::vector<std::string> selected;              // distinct, sorted
  std::map<std::string, std::string> pilot_map;   // entry_id -> pilot_id
  TerminalCounts terminal_counts;
  std::vector<std::string> pending;               // selected but not yet submitted
  bool reconfigured = false;                      // this campaign enabled benchmarks
};

struct CampaignStatus {
  std::int64_t queued = 0;
  std::int64_t running = 0;
  std::int64_t completed = 0;
  std::int64_t failed = 0;
  std::int64_t timed_out = 0;
  std::int64_t pending_submit = 0;

  std::int64_t total() const {
    return queued + running + completed + failed + timed_out + pending_submit;
  }
  bool operator==(const CampaignStatus&) const = default;
};

ordered_json campaign_summary_json(const CampaignRecord& c);
ordered_json to_json(const CampaignStatus& s, const std::string& campaign_id);

// The benchmark control system. Shares the factory's timeline; not internally
// synchronized.
class Runner {
 public:
  explicit Runner(Factory& factory) : factory_(factory) {}

  // Due entries for the policy's spec, excluding entries that already have a
  // live or pending benchmark for it, reduced by the sampling mode. Sorted.
  std::vector<std::string> select(const RunnerPolicy& policy, SimTime now) const;

  // select() followed by launch_campaign(). Throws std::invalid_argument when
  // the spec is unknown or nothing is selected.
  const CampaignRecord& trigger(const RunnerPolicy& policy, SimTime now);

  // Enables benchmarks through one reconfig if needed, then submits as many
  // pilots as the concurrency cap allows; the rest wait for wake(). A failed
  // reconfig throws and records nothing.
  const CampaignRecord& launch_campaign(std::vector<std::string> selected,
                                        const RunnerPolicy& policy, SimTime now);

  // Retries pending submissions and refreshes terminal counts.
  void wake(SimTime now);

  CampaignStatus campaign_status(std::string_view campaign_id) const;  // throws NotFound
  const CampaignRecord& campaign(std::string_view campaign_id) const;  // throws NotFound
  const std::vector<CampaignRecord>& campaigns() const { return campaigns_; }

  StartHistory start_history(const std::string& spec_id) const;
  std::int64_t reconfigs_issued() const { return reconfigs_issued_; }

 private:
  void submit_pending(CampaignRecord& c, SimTime now);
  std::set<std::string> busy_entries(const std::string& spec_id) const;
  void refresh_counts(CampaignRecord& c) const;

  Factory& factory_;
  std::vector<CampaignRecord> campaigns_;
  std::int64_t reconfigs_issued_ = 0;
};

}  // namespace glidebench
