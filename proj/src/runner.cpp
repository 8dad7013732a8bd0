#include "glidebench/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "glidebench/errors.hpp"

namespace glidebench {

std::string_view to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::all_due:
      return "all_due";
    case SamplingMode::representative_per_class:
      return "representative_per_class";
    case SamplingMode::new_only:
      return "new_only";
  }
  return "all_due";
}

std::optional<SamplingMode> parse_sampling_mode(std::string_view text) {
  if (text == "all_due") return SamplingMode::all_due;
  if (text == "representative_per_class") return SamplingMode::representative_per_class;
  if (text == "new_only") return SamplingMode::new_only;
  return std::nullopt;
}

std::vector<std::string> validate_runner_policy(const RunnerPolicy& policy) {
  std::vector<std::string> out;
  if (!(policy.min_interval_s > 0.0)) out.emplace_back("min_interval_s must be > 0");
  if (policy.max_concurrent_benchmarks < 1) out.emplace_back("max_concurrent_benchmarks must be >= 1");
  if (policy.spec_id.empty()) out.emplace_back("spec_id empty");
  return out;
}

RunnerPolicy policy_from_json(const ordered_json& j) {
  ObjectReader in(j, "policies");
  RunnerPolicy p;
  p.min_interval_s = in.number_or("min_interval_s", p.min_interval_s);
  const std::string mode = in.string_or("mode", "all_due");
  auto parsed = parse_sampling_mode(mode);
  if (!parsed) throw ParseError("policies: unknown mode '" + mode + "'");
  p.mode = *parsed;
  p.spec_id = in.string("spec_id");
  p.max_concurrent_benchmarks = in.integer_or("max_concurrent_benchmarks", p.max_concurrent_benchmarks);
  in.finish();
  if (auto v = validate_runner_policy(p); !v.empty()) throw ValidationError(std::move(v));
  return p;
}

ordered_json to_json(const RunnerPolicy& policy) {
  ordered_json j;
  j["min_interval_s"] = policy.min_interval_s;
  j["mode"] = std::string(to_string(policy.mode));
  j["spec_id"] = policy.spec_id;
  j["max_concurrent_benchmarks"] = policy.max_concurrent_benchmarks;
  return j;
}

std::vector<std::string> due_entries(const std::vector<EntryConfig>& entries,
                                     const StartHistory& history, SimTime now,
                                     const RunnerPolicy& policy) {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (!e.enabled) continue;
    auto it = history.find(e.entry_id);
    if (it == history.end() || now - it->second >= policy.min_interval_s) out.push_back(e.entry_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::string> sample_representatives(const std::vector<std::string>& due,
                                                const std::map<std::string, std::string>& fingerprints,
                                                const StartHistory& history,
                                                const RunnerPolicy& policy) {
  std::vector<std::string> out;
  switch (policy.mode) {
    case SamplingMode::all_due:
      out = due;
      break;
    case SamplingMode::new_only:
      for (const auto& id : due) {
        if (!history.contains(id)) out.push_back(id);
      }
      break;
    case SamplingMode::representative_per_class: {
      // class -> (last start, entry_id) of the current pick
      std::map<std::string, std::pair<SimTime, std::string>> pick;
      for (const auto& id : due) {
        auto h = history.find(id);
        if (h == history.end()) {
          out.push_back(id);  // never benchmarked: always selected
          continue;
        }
        auto fp = fingerprints.find(id);
        const std::string cls = fp == fingerprints.end() ? std::string() : fp->second;
        auto [it, inserted] = pick.try_emplace(cls, h->second, id);
        if (!inserted && std::make_pair(h->second, id) < it->second) it->second = {h->second, id};
      }
      for (const auto& [cls, choice] : pick) out.push_back(choice.second);
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ordered_json campaign_summary_json(const CampaignRecord& c) {
  ordered_json j;
  j["campaign_id"] = c.campaign_id;
  j["created_at"] = c.created_at;
  j["spec_id"] = c.policy.spec_id;
  j["mode"] = std::string(to_string(c.policy.mode));
  j["min_interval_s"] = c.policy.min_interval_s;
  j["max_concurrent_benchmarks"] = c.policy.max_concurrent_benchmarks;
  j["selected"] = c.selected;
  j["submitted"] = static_cast<std::int64_t>(c.pilot_map.size());
  j["pending_submit"] = static_cast<std::int64_t>(c.pending.size());
  j["reconfigured"] = c.reconfigured;
  return j;
}

ordered_json to_json(const CampaignStatus& s, const std::string& campaign_id) {
  ordered_json j;
  j["campaign_id"] = campaign_id;
  j["queued"] = s.queued;
  j["running"] = s.running;
  j["completed"] = s.completed;
  j["failed"] = s.failed;
  j["timed_out"] = s.timed_out;
  j["pending_submit"] = s.pending_submit;
  return j;
}

StartHistory Runner::start_history(const std::string& spec_id) const {
  StartHistory history;
  factory_.visit_pilots([&](const PilotRecord& p) {
    if (p.purpose != PilotPurpose::benchmark || p.spec_id != spec_id || !p.started_at) return;
    auto [it, inserted] = history.try_emplace(p.entry_id, *p.started_at);
    if (!inserted) it->second = std::max(it->second, *p.started_at);
  });
  return history;
}

std::set<std::string> Runner::busy_entries(const std::string& spec_id) const {
  std::set<std::string> busy;
  factory_.visit_pilots([&](const PilotRecord& p) {
    if (p.purpose == PilotPurpose::benchmark && p.spec_id == spec_id && !is_terminal(p.state)) {
      busy.insert(p.entry_id);
    }
  });
  for (const auto& c : campaigns_) {
    if (c.policy.spec_id != spec_id) continue;
    busy.insert(c.pending.begin(), c.pending.end());
  }
  return busy;
}

std::vector<std::string> Runner::select(const RunnerPolicy& policy, SimTime now) const {
  const auto history = start_history(policy.spec_id);
  const auto busy = busy_entries(policy.spec_id);

  std::vector<std::string> due;
  for (auto& id : due_entries(factory_.config().entries, history, now, policy)) {
    if (!busy.contains(id)) due.push_back(std::move(id));
  }
  std::map<std::string, std::string> fingerprints;
  for (const auto& e : factory_.config().entries) {
    fingerprints[e.entry_id] = hardware_fingerprint(e.cpu_model);
  }
  return sample_representatives(due, fingerprints, history, policy);
}

const CampaignRecord& Runner::trigger(const RunnerPolicy& policy, SimTime now) {
  if (auto v = validate_runner_policy(policy); !v.empty()) throw ValidationError(std::move(v));
  if (factory_.find_spec(policy.spec_id) == nullptr) {
    throw std::invalid_argument("unknown spec_id '" + policy.spec_id + "'");
  }
  auto selected = select(policy, now);
  if (selected.empty()) throw std::invalid_argument("no entries selected");
  return launch_campaign(std::move(selected), policy, now);
}

const CampaignRecord& Runner::launch_campaign(std::vector<std::string> selected,
                                              const RunnerPolicy& policy, SimTime now) {
  if (selected.empty()) throw std::invalid_argument("launch_campaign needs a non-empty selection");
  std::sort(selected.begin(), selected.end());
  if (std::adjacent_find(selected.begin(), selected.end()) != selected.end()) {
    throw std::invalid_argument("selected entries must be distinct");
  }

  bool reconfigured = false;
  if (!factory_.config().benchmarks_enabled) {
    FactoryConfig next = factory_.config();
    next.benchmarks_enabled = true;
    factory_.reconfig(std::move(next));  // throws: campaign aborted, nothing recorded
    ++reconfigs_issued_;
    reconfigured = true;
  }

  CampaignRecord c;
  char id[32];
  std::snprintf(id, sizeof id, "c-%06zu", campaigns_.size() + 1);
  c.campaign_id = id;
  c.created_at = now;
  c.policy = policy;
  c.selected = std::move(selected);
  c.pending = c.selected;
  c.reconfigured = reconfigured;
  campaigns_.push_back(std::move(c));

  CampaignRecord& stored = campaigns_.back();
  submit_pending(stored, now);
  return stored;
}

void Runner::submit_pending(CampaignRecord& c, SimTime now) {
  std::vector<std::string> still_pending;
  for (auto& entry_id : c.pending) {
    if (factory_.live_benchmarks() >= c.policy.max_concurrent_benchmarks) {
      still_pending.push_back(std::move(entry_id));
      continue;
    }
    try {
      c.pilot_map[entry_id] =
          factory_.submit_single(entry_id, PilotPurpose::benchmark, c.policy.spec_id, now);
    } catch (const Rejection&) {
      still_pending.push_back(std::move(entry_id));
    }
  }
  c.pending = std::move(still_pending);
}

void Runner::refresh_counts(CampaignRecord& c) const {
  TerminalCounts t;
  for (const auto& [entry, pilot_id] : c.pilot_map) {
    switch (factory_.pilot(pilot_id).state) {
      case PilotState::COMPLETED:
        ++t.completed;
        break;
      case PilotState::FAILED:
        ++t.failed;
        break;
      case PilotState::TIMED_OUT:
        ++t.timed_out;
        break;
      default:
        break;
    }
  }
  c.terminal_counts = t;
}

void Runner::wake(SimTime now) {
  for (auto& c : campaigns_) {
    const auto& t = c.terminal_counts;
    const bool settled = c.pending.empty() &&
                         t.completed + t.failed + t.timed_out ==
                             static_cast<std::int64_t>(c.selected.size());
    if (settled) continue;
    if (!c.pending.empty()) submit_pending(c, now);
    refresh_counts(c);
  }
}

const CampaignRecord& Runner::campaign(std::string_view campaign_id) const {
  for (const auto& c : campaigns_) {
    if (c.campaign_id == campaign_id) return c;
  }
  throw NotFound("unknown campaign '" + std::string(campaign_id) + "'");
}

CampaignStatus Runner::campaign_status(std::string_view campaign_id) const {
  const CampaignRecord& c = campaign(campaign_id);
  CampaignStatus s;
  s.pending_submit = static_cast<std::int64_t>(c.pending.size());
  for (const auto& [entry, pilot_id] : c.pilot_map) {
    switch (factory_.pilot(pilot_id).state) {
      case PilotState::SUBMITTED:
      case PilotState::QUEUED:
        ++s.queued;
        break;
      case PilotState::RUNNING:
        ++s.running;
        break;
      case PilotState::COMPLETED:
        ++s.completed;
        break;
      case PilotState::FAILED:
        ++s.failed;
        break;
      case PilotState::TIMED_OUT:
        ++s.timed_out;
        break;
    }
  }
  return s;
}

}  // namespace glidebench
