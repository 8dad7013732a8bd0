#include "glidebench/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "glidebench/errors.hpp"

namespace glidebench {

Simulation::Simulation(Scenario scenario)
    : scenario_(std::move(scenario)),
      factory_(scenario_.factory, scenario_.specs),
      runner_(factory_),
      store_(scenario_.specs) {
  factory_.set_queued_hook([this](const PilotRecord& p) { on_queued(p); });
  queue_.push(0.0, EventKind::FACTORY_CYCLE);
  queue_.push(0.0, EventKind::RUNNER_WAKE);
  schedule_commands();
}

void Simulation::schedule_commands() {
  std::size_t order = 0;
  for (const auto& t : scenario_.campaigns) commands_.push_back({t.at, order++, t, std::nullopt});
  for (const auto& p : scenario_.pressure) commands_.push_back({p.at, order++, std::nullopt, p});
  std::stable_sort(commands_.begin(), commands_.end(),
                   [](const Command& a, const Command& b) { return a.at < b.at; });
}

Simulation::EntryStreams& Simulation::streams(const std::string& entry_id) {
  auto it = streams_.find(entry_id);
  if (it == streams_.end()) {
    const auto seed = scenario_.seed;
    it = streams_
             .emplace(entry_id, EntryStreams{RngStream(seed, "delay/" + entry_id),
                                             RngStream(seed, "fail/" + entry_id),
                                             RngStream(seed, "perf/" + entry_id)})
             .first;
  }
  return it->second;
}

void Simulation::log(ordered_json line) { trace_.push_back(line.dump()); }

void Simulation::on_queued(const PilotRecord& pilot) {
  const FabricProfile* profile = scenario_.profile(pilot.entry_id);
  const double delay = profile ? sample_queue_delay(*profile, streams(pilot.entry_id).delay) : 0.0;
  const SimTime submitted = pilot.submitted_at.value_or(now_);
  queue_.push(submitted + delay, EventKind::PILOT_START, pilot.pilot_id);
  log({{"t", submitted},
       {"event", "PILOT_QUEUED"},
       {"pilot_id", pilot.pilot_id},
       {"entry_id", pilot.entry_id},
       {"purpose", std::string(to_string(pilot.purpose))},
       {"start_at", submitted + delay}});
}

void Simulation::advance_to(SimTime t) {
  if (t < now_) throw std::invalid_argument("cannot move the simulation clock backwards");

  std::optional<SimTime> next_periodic;
  if (scenario_.campaign_every_s) {
    const double every = *scenario_.campaign_every_s;
    // First periodic trigger at or after now_ that has not yet run.
    const double k = std::ceil(now_ / every);
    next_periodic = k * every;
    if (periodic_done_ && *periodic_done_ >= *next_periodic) *next_periodic += every;
  }

  while (true) {
    const SimEvent* ev = queue_.peek();
    const bool have_ev = ev != nullptr && ev->time <= t;
    const bool have_cmd = next_command_ < commands_.size() && commands_[next_command_].at <= t;
    const bool have_periodic = next_periodic && *next_periodic <= t;
    if (!have_ev && !have_cmd && !have_periodic) break;

    SimTime cmd_time = std::numeric_limits<double>::infinity();
    if (have_cmd) cmd_time = commands_[next_command_].at;
    if (have_periodic) cmd_time = std::min(cmd_time, *next_periodic);

    if (have_ev && ev->time <= cmd_time) {
      const SimEvent next = *queue_.advance();
      now_ = next.time;
      process(next);
      continue;
    }
    now_ = std::max(now_, cmd_time);
    if (have_cmd && commands_[next_command_].at <= cmd_time) {
      apply(commands_[next_command_++]);
    } else {
      Command periodic;
      periodic.at = *next_periodic;
      periodic.campaign = CampaignTrigger{*next_periodic, std::nullopt, std::nullopt};
      periodic_done_ = *next_periodic;
      *next_periodic += *scenario_.campaign_every_s;
      apply(periodic);
    }
  }
  now_ = t;
}

void Simulation::apply(const Command& cmd) {
  if (cmd.pressure) {
    const auto& p = *cmd.pressure;
    ordered_json body;
    body["client_id"] = p.client_id;
    body["entry_id"] = p.entry_id;
    body["requested"] = p.requested;
    factory_.mailbox_post({"", p.client_id, std::string(kFactoryMailbox),
                           MessageKind::pressure_request, body.dump(), now_});
    log({{"t", now_},
         {"command", "pressure"},
         {"client_id", p.client_id},
         {"entry_id", p.entry_id},
         {"requested", p.requested}});
    return;
  }
  if (cmd.campaign) {
    RunnerPolicy policy = scenario_.policy;
    if (cmd.campaign->spec_id) policy.spec_id = *cmd.campaign->spec_id;
    if (cmd.campaign->mode) policy.mode = *cmd.campaign->mode;
    try {
      trigger_campaign(policy);
    } catch (const std::invalid_argument& e) {
      log({{"t", now_}, {"command", "campaign_skipped"}, {"reason", e.what()}});
    }
  }
}

const CampaignRecord& Simulation::trigger_campaign(const RunnerPolicy& policy) {
  const CampaignRecord& c = runner_.trigger(policy, now_);
  log({{"t", now_},
       {"command", "campaign"},
       {"campaign_id", c.campaign_id},
       {"spec_id", c.policy.spec_id},
       {"mode", std::string(to_string(c.policy.mode))},
       {"selected", c.selected.size()},
       {"submitted", c.pilot_map.size()},
       {"factory_version", factory_.config().version}});
  return c;
}

std::int64_t Simulation::reconfig(std::string_view document) {
  const auto version = factory_.reconfig(document);
  log({{"t", now_}, {"command", "reconfig"}, {"factory_version", version}});
  return version;
}

void Simulation::set_pressure(const std::string& client_id, const std::string& entry_id,
                              std::int64_t requested) {
  factory_.set_pressure(client_id, entry_id, requested);
}

void Simulation::process(const SimEvent& ev) {
  ++events_processed_;
  ordered_json line{{"t", ev.time}, {"seq", ev.seq}, {"event", std::string(to_string(ev.kind))}};

  switch (ev.kind) {
    case EventKind::FACTORY_CYCLE: {
      const auto subs = factory_.cycle(ev.time);
      ordered_json s = ordered_json::array();
      for (const auto& sub : subs) s.push_back({{"entry_id", sub.entry_id}, {"count", sub.count}});
      line["submissions"] = s;
      queue_.push(ev.time + factory_.config().cycle_period_s, EventKind::FACTORY_CYCLE);
      break;
    }
    case EventKind::RUNNER_WAKE:
      runner_.wake(ev.time);
      queue_.push(ev.time + scenario_.runner_wake_s, EventKind::RUNNER_WAKE);
      break;
    case EventKind::PILOT_START: {
      line["pilot_id"] = ev.pilot_id;
      const PilotRecord& rec = factory_.pilot(ev.pilot_id);
      line["entry_id"] = rec.entry_id;
      const FabricProfile* profile = scenario_.profile(rec.entry_id);
      if (profile == nullptr) {
        // Entry added by a reconfig with no simulated fabric behind it.
        factory_.mark_finished(ev.pilot_id, PilotState::FAILED, ev.time,
                               {std::string(kErrorPrefix) + "no_fabric_node"});
        line["outcome"] = "FAILED";
        break;
      }
      factory_.mark_running(ev.pilot_id, ev.time);

      PilotContext ctx;
      ctx.pilot_id = rec.pilot_id;
      ctx.entry_id = rec.entry_id;
      ctx.purpose = rec.purpose;
      if (rec.spec_id) {
        if (const BenchmarkSpec* spec = factory_.find_spec(*rec.spec_id)) ctx.spec = *spec;
      }
      ctx.node = profile->node;
      ctx.container_available = factory_.pilot_entry(ev.pilot_id).supports_containers;
      ctx.started_at = ev.time;

      auto& rng = streams(rec.entry_id);
      SimulatedExecutor executor(*profile, rng.fail, rng.perf);
      PilotOutcome outcome = run(ctx, executor);
      const double busy =
          rec.purpose == PilotPurpose::user ? scenario_.user_pilot_runtime_s : outcome.payload_s;
      queue_.push(ev.time + busy, EventKind::PILOT_FINISH, ev.pilot_id);
      line["finish_at"] = ev.time + busy;
      outcomes_.emplace(ev.pilot_id, std::move(outcome));
      break;
    }
    case EventKind::PILOT_FINISH: {
      line["pilot_id"] = ev.pilot_id;
      auto it = outcomes_.find(ev.pilot_id);
      if (it == outcomes_.end()) throw std::logic_error("finish without start for " + ev.pilot_id);
      PilotOutcome outcome = std::move(it->second);
      outcomes_.erase(it);
      line["state"] = std::string(to_string(outcome.terminal));
      factory_.mark_finished(ev.pilot_id, outcome.terminal, ev.time, outcome.stderr_lines);

      // The viewer side: read the pilot's stderr and keep what verifies.
      ParsedStream parsed = parse_stream(factory_.pilot(ev.pilot_id).stderr_lines);
      for (auto& d : parsed.diagnostics) diagnostics_.push_back(std::move(d));
      std::int64_t accepted = 0;
      for (const auto& r : parsed.results) {
        if (store_.ingest(r) == IngestStatus::accepted) ++accepted;
      }
      if (!parsed.results.empty()) line["results_ingested"] = accepted;
      break;
    }
  }
  trace_.push_back(line.dump());
  if (observer_) observer_(ev, *this);
}

std::vector<EntryScore> Simulation::scores(const std::string& spec_id) const {
  return aggregate_all(store_, spec_id, scenario_.aggregate);
}

std::map<std::string, std::int64_t> Simulation::in_flight() const {
  std::map<std::string, std::int64_t> out;
  for (const auto& e : factory_.config().entries) out[e.entry_id] = factory_.in_flight(e.entry_id);
  return out;
}

Eligibility Simulation::eligibility(const std::string& spec_id) const {
  return eligible_candidates(scores(spec_id), factory_.config(), in_flight(), now_,
                             scenario_.score_ttl_s);
}

Simulation::PlanResult Simulation::plan(double demand, const std::string& spec_id) const {
  Eligibility el = eligibility(spec_id);
  PlanResult out;
  out.plan = plan_greedy(demand, el.candidates);
  out.unknown = std::move(el.unknown);
  return out;
}

ordered_json Simulation::summary() const {
  ordered_json j;
  j["sim_time"] = now_;
  j["seed"] = scenario_.seed;
  j["factory_version"] = factory_.config().version;
  j["events_processed"] = events_processed_;

  ordered_json bench;
  bench["queued"] = factory_.benchmark_count(PilotState::QUEUED);
  bench["running"] = factory_.benchmark_count(PilotState::RUNNING);
  bench["completed"] = factory_.benchmark_count(PilotState::COMPLETED);
  bench["failed"] = factory_.benchmark_count(PilotState::FAILED);
  bench["timed_out"] = factory_.benchmark_count(PilotState::TIMED_OUT);
  j["benchmark_pilots"] = bench;

  j["campaigns"] = ordered_json::array();
  for (const auto& c : runner_.campaigns()) {
    ordered_json cj = campaign_summary_json(c);
    cj["status"] = to_json(runner_.campaign_status(c.campaign_id), c.campaign_id);
    cj["status"].erase("campaign_id");
    j["campaigns"].push_back(cj);
  }

  j["results"] = {{"stored", store_.size()}, {"stream_diagnostics", diagnostics_.size()}};

  ordered_json scores_j = ordered_json::object();
  for (const auto& spec : scenario_.specs) {
    ordered_json arr = ordered_json::array();
    for (const auto& s : scores(spec.spec_id)) arr.push_back(to_json(s, now_));
    scores_j[spec.spec_id] = arr;
  }
  j["scores"] = scores_j;

  if (scenario_.demand) {
    const auto p = plan(scenario_.demand->throughput, scenario_.demand->spec_id);
    ordered_json pj;
    pj["demand"] = scenario_.demand->throughput;
    pj["spec_id"] = scenario_.demand->spec_id;
    const ordered_json plan_j = to_json(p.plan);
    for (const auto& [k, v] : plan_j.items()) pj[k] = v;
    pj["unknown"] = p.unknown;
    j["plan"] = pj;
  } else {
    j["plan"] = nullptr;
  }
  return j;
}

}  // namespace glidebench
