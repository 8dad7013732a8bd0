#include "glidebench/factory.hpp"

#include <algorithm>
#include <set>

#include "glidebench/errors.hpp"

namespace glidebench {

const EntryConfig* FactoryConfig::find(std::string_view entry_id) const {
  for (const auto& e : entries) {
    if (e.entry_id == entry_id) return &e;
  }
  return nullptr;
}

std::vector<std::string> validate_factory_config(const FactoryConfig& cfg) {
  std::vector<std::string> out;
  if (cfg.version < 1) out.emplace_back("version must be >= 1");
  if (!(cfg.cycle_period_s > 0.0)) out.emplace_back("cycle_period_s must be > 0");
  if (cfg.max_submit_per_cycle < 1) out.emplace_back("max_submit_per_cycle must be >= 1");
  std::set<std::string> seen;
  for (const auto& e : cfg.entries) {
    for (auto& v : validate_entry_config(e)) {
      out.push_back(e.entry_id.empty() ? v : "entry '" + e.entry_id + "': " + v);
    }
    if (!e.entry_id.empty() && !seen.insert(e.entry_id).second) {
      out.push_back("duplicate entry_id '" + e.entry_id + "'");
    }
  }
  return out;
}

FactoryConfig config_from_json(const ordered_json& document) {
  ObjectReader in(document, "factory config");
  FactoryConfig cfg;
  const auto& entries = in.raw("entries");
  if (!entries.is_array()) throw ParseError("factory config: 'entries' must be an array");
  for (const auto& e : entries) cfg.entries.push_back(entry_config_from_json(e));
  cfg.benchmarks_enabled = in.boolean_or("benchmarks_enabled", false);
  cfg.cycle_period_s = in.number_or("cycle_period_s", 60.0);
  cfg.max_submit_per_cycle = in.integer_or("max_submit_per_cycle", 100);
  in.finish();
  if (auto v = validate_factory_config(cfg); !v.empty()) throw ValidationError(std::move(v));
  return cfg;
}

FactoryConfig load_config(std::string_view document) {
  return config_from_json(parse_json_text(document));
}

ordered_json config_input_json(const FactoryConfig& cfg) {
  ordered_json j;
  j["entries"] = ordered_json::array();
  for (const auto& e : cfg.entries) j["entries"].push_back(to_json(e));
  j["benchmarks_enabled"] = cfg.benchmarks_enabled;
  j["cycle_period_s"] = cfg.cycle_period_s;
  j["max_submit_per_cycle"] = cfg.max_submit_per_cycle;
  return j;
}

ordered_json config_json(const FactoryConfig& cfg) {
  ordered_json j;
  j["version"] = cfg.version;
  const ordered_json input = config_input_json(cfg);
  for (const auto& [k, v] : input.items()) j[k] = v;
  return j;
}

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::pressure_request:
      return "pressure_request";
    case MessageKind::status_report:
      return "status_report";
    case MessageKind::campaign_notice:
      return "campaign_notice";
  }
  return "unknown";
}

Factory::Factory(FactoryConfig config, std::vector<BenchmarkSpec> specs)
    : config_(std::move(config)), specs_(std::move(specs)) {
  config_.version = 1;
  if (auto v = validate_factory_config(config_); !v.empty()) throw ValidationError(std::move(v));
}

const BenchmarkSpec* Factory::find_spec(std::string_view spec_id) const {
  for (const auto& s : specs_) {
    if (s.spec_id == spec_id) return &s;
  }
  return nullptr;
}

std::int64_t Factory::reconfig(std::string_view document) {
  return reconfig(load_config(document));
}

std::int64_t Factory::reconfig(FactoryConfig next) {
  next.version = config_.version + 1;
  if (auto v = validate_factory_config(next); !v.empty()) throw ValidationError(std::move(v));
  config_ = std::move(next);
  return config_.version;
}

void Factory::set_pressure(const std::string& client_id, const std::string& entry_id,
                           std::int64_t requested) {
  const EntryConfig* entry = config_.find(entry_id);
  if (entry == nullptr) throw Rejection("unknown_entry", entry_id);
  if (!entry->enabled) throw Rejection("entry_disabled", entry_id);
  if (requested < 0) throw Rejection("invalid_request", "requested must be >= 0");
  pressure_[{client_id, entry_id}] = requested;
}

std::int64_t Factory::total_requested(std::string_view entry_id) const {
  std::int64_t total = 0;
  for (const auto& [key, n] : pressure_) {
    if (key.second == entry_id) total += n;
  }
  return total;
}

std::vector<PressureRequest> Factory::pressure_requests() const {
  std::vector<PressureRequest> out;
  for (const auto& [key, n] : pressure_) out.push_back({key.first, key.second, n});
  return out;
}

void Factory::process_mail(SimTime now) {
  for (auto& msg : mailbox_fetch(std::string(kFactoryMailbox))) {
    if (msg.kind != MessageKind::pressure_request) continue;
    std::string error;
    try {
      const ordered_json body = parse_json_text(msg.body);
      ObjectReader in(body, "pressure_request");
      const auto client = in.string_or("client_id", msg.from);
      const auto entry = in.string("entry_id");
      const auto requested = in.integer("requested");
      in.finish();
      set_pressure(client, entry, requested);
    } catch (const Rejection& e) {
      error = e.reason();
    } catch (const ParseError& e) {
      error = "malformed_request";
    }
    if (!error.empty()) {
      ordered_json body;
      body["in_reply_to"] = msg.msg_id;
      body["error"] = error;
      mailbox_post({"", std::string(kFactoryMailbox), msg.from, MessageKind::status_report,
                    body.dump(), now});
    }
  }
}

std::vector<Submission> Factory::cycle(SimTime now) {
  process_mail(now);

  std::vector<const EntryConfig*> order;
  for (const auto& e : config_.entries) order.push_back(&e);
  std::sort(order.begin(), order.end(),
            [](const EntryConfig* a, const EntryConfig* b) { return a->entry_id < b->entry_id; });

  std::vector<Submission> out;
  std::int64_t budget = config_.max_submit_per_cycle;
  for (const EntryConfig* entry : order) {
    if (budget <= 0) break;
    if (!entry->enabled) continue;
    const std::int64_t inflight = in_flight(entry->entry_id);
    const std::int64_t deficit = std::max<std::int64_t>(0, total_requested(entry->entry_id) - inflight);
    const std::int64_t room = std::max<std::int64_t>(0, entry->max_pilots - inflight);
    const std::int64_t n = std::min({deficit, room, budget});
    if (n <= 0) continue;
    for (std::int64_t i = 0; i < n; ++i) create_pilot(*entry, PilotPurpose::user, std::nullopt, now);
    budget -= n;
    out.push_back({entry->entry_id, n});
  }
  return out;
}

std::string Factory::submit_single(const std::string& entry_id, PilotPurpose purpose,
                                   const std::optional<std::string>& spec_id, SimTime now) {
  const EntryConfig* entry = config_.find(entry_id);
  if (entry == nullptr) throw Rejection("unknown_entry", entry_id);
  if (!entry->enabled) throw Rejection("entry_disabled", entry_id);
  if (purpose == PilotPurpose::benchmark) {
    if (!config_.benchmarks_enabled) throw Rejection("benchmarks_disabled", entry_id);
    if (!spec_id || find_spec(*spec_id) == nullptr) {
      throw Rejection("unknown_spec", spec_id.value_or("<none>"));
    }
  } else if (spec_id) {
    throw Rejection("invalid_request", "user pilots carry no spec_id");
  }
  if (in_flight(entry_id) >= entry->max_pilots) throw Rejection("entry_full", entry_id);
  return create_pilot(*entry, purpose, spec_id, now);
}

std::string Factory::create_pilot(const EntryConfig& entry, PilotPurpose purpose,
                                  const std::optional<std::string>& spec_id, SimTime now) {
  Tracked t;
  t.entry = entry;
  t.record.pilot_id = format_pilot_id(next_pilot_seq_++);
  t.record.entry_id = entry.entry_id;
  t.record.purpose = purpose;
  t.record.spec_id = spec_id;
  t.record.state = PilotState::SUBMITTED;
  t.record.submitted_at = now;
  transition(t.record, PilotState::QUEUED, now);
  adjust_counts(t.record, PilotState::SUBMITTED, PilotState::QUEUED);

  auto [it, inserted] = pilots_.emplace(t.record.pilot_id, std::move(t));
  if (on_queued_) on_queued_(it->second.record);
  return it->first;
}

void Factory::adjust_counts(const PilotRecord& pilot, PilotState from, PilotState to) {
  auto& c = counts_[pilot.entry_id];
  auto bump = [&c](PilotState s, int delta) {
    if (s == PilotState::QUEUED) c.queued += delta;
    if (s == PilotState::RUNNING) c.running += delta;
  };
  bump(from, -1);
  bump(to, +1);
  if (pilot.purpose == PilotPurpose::benchmark) {
    if (from != PilotState::SUBMITTED) --benchmark_states_[from];
    ++benchmark_states_[to];
    live_benchmarks_ += (is_live(to) ? 1 : 0) - (is_live(from) ? 1 : 0);
  }
}

Factory::Tracked& Factory::tracked(std::string_view pilot_id) {
  auto it = pilots_.find(pilot_id);
  if (it == pilots_.end()) throw NotFound("unknown pilot " + std::string(pilot_id));
  return it->second;
}

const Factory::Tracked& Factory::tracked(std::string_view pilot_id) const {
  auto it = pilots_.find(pilot_id);
  if (it == pilots_.end()) throw NotFound("unknown pilot " + std::string(pilot_id));
  return it->second;
}

const PilotRecord& Factory::pilot(std::string_view pilot_id) const {
  return tracked(pilot_id).record;
}

const EntryConfig& Factory::pilot_entry(std::string_view pilot_id) const {
  return tracked(pilot_id).entry;
}

void Factory::mark_running(std::string_view pilot_id, SimTime now) {
  auto& t = tracked(pilot_id);
  const PilotState from = t.record.state;
  transition(t.record, PilotState::RUNNING, now);
  adjust_counts(t.record, from, PilotState::RUNNING);
}

void Factory::mark_finished(std::string_view pilot_id, PilotState terminal, SimTime now,
                            std::vector<std::string> stderr_lines) {
  if (!is_terminal(terminal)) throw TransitionError("mark_finished needs a terminal state");
  auto& t = tracked(pilot_id);
  const PilotState from = t.record.state;
  transition(t.record, terminal, now);
  t.record.stderr_lines = std::move(stderr_lines);
  adjust_counts(t.record, from, terminal);
}

std::vector<PilotRecord> Factory::query_pilots(const PilotFilter& filter) const {
  std::vector<PilotRecord> out;
  for (const auto& [id, t] : pilots_) {
    const auto& p = t.record;
    if (filter.entry_id && p.entry_id != *filter.entry_id) continue;
    if (filter.purpose && p.purpose != *filter.purpose) continue;
    if (!filter.states.empty() &&
        std::find(filter.states.begin(), filter.states.end(), p.state) == filter.states.end()) {
      continue;
    }
    out.push_back(p);
  }
  return out;
}

void Factory::visit_pilots(const std::function<void(const PilotRecord&)>& fn) const {
  for (const auto& [id, t] : pilots_) fn(t.record);
}

std::int64_t Factory::queued(std::string_view entry_id) const {
  auto it = counts_.find(entry_id);
  return it == counts_.end() ? 0 : it->second.queued;
}

std::int64_t Factory::running(std::string_view entry_id) const {
  auto it = counts_.find(entry_id);
  return it == counts_.end() ? 0 : it->second.running;
}

std::int64_t Factory::benchmark_count(PilotState state) const {
  auto it = benchmark_states_.find(state);
  return it == benchmark_states_.end() ? 0 : it->second;
}

std::string Factory::mailbox_post(MailboxMessage msg) {
  if (msg.msg_id.empty()) msg.msg_id = "m-" + std::to_string(next_msg_seq_++);
  std::string id = msg.msg_id;
  mailboxes_[msg.to].push_back(std::move(msg));
  return id;
}

std::vector<MailboxMessage> Factory::mailbox_fetch(const std::string& recipient) {
  auto it = mailboxes_.find(recipient);
  if (it == mailboxes_.end()) return {};
  std::vector<MailboxMessage> out(std::make_move_iterator(it->second.begin()),
                                  std::make_move_iterator(it->second.end()));
  it->second.clear();
  return out;
}

}  // namespace glidebench
