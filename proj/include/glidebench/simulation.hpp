#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "glidebench/collector.hpp"
#include "glidebench/fabricsim.hpp"
#include "glidebench/factory.hpp"
#include "glidebench/pilot.hpp"
#include "glidebench/runner.hpp"
#include "glidebench/scenario.hpp"

namespace glidebench {

// The whole loop on one discrete-event timeline: factory cycles, runner wakes,
// pilot starts and finishes, and the scenario's scheduled commands. Pilot
// stderr is handed to the collector when a pilot finishes.
//
// Scheduled commands at time t run after every event at time <= t.
class Simulation {
 public:
  // Called after each processed event; used by tests to check invariants at
  // cycle boundaries.
  using EventObserver = std::function<void(const SimEvent&, const Simulation&)>;

  explicit Simulation(Scenario scenario);
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const Scenario& scenario() const { return scenario_; }
  SimTime now() const { return now_; }

  Factory& factory() { return factory_; }
  const Factory& factory() const { return factory_; }
  Runner& runner() { return runner_; }
  const Runner& runner() const { return runner_; }
  const ResultStore& store() const { return store_; }
  const std::vector<StreamDiagnostic>& stream_diagnostics() const { return diagnostics_; }
  const std::vector<std::string>& trace() const { return trace_; }
  std::uint64_t events_processed() const { return events_processed_; }

  void set_observer(EventObserver fn) { observer_ = std::move(fn); }

  // Processes events and scheduled commands up to and including t, then sets
  // the clock to t. t earlier than now() is an error.
  void advance_to(SimTime t);
  void advance_by(double seconds) { advance_to(now_ + seconds); }

  // Commands applied immediately at now().
  const CampaignRecord& trigger_campaign(const RunnerPolicy& policy);
  std::int64_t reconfig(std::string_view document);
  void set_pressure(const std::string& client_id, const std::string& entry_id,
                    std::int64_t requested);

  std::vector<EntryScore> scores(const std::string& spec_id) const;
  std::map<std::string, std::int64_t> in_flight() const;
  Eligibility eligibility(const std::string& spec_id) const;

  struct PlanResult {
    ProvisionPlan plan;
    std::vector<std::string> unknown;
  };
  PlanResult plan(double demand, const std::string& spec_id) const;

  // Run summary: campaigns, per-spec scores, and the scenario demand plan.
  ordered_json summary() const;

 private:
  struct Command {
    SimTime at = 0.0;
    std::size_t order = 0;
    std::optional<CampaignTrigger> campaign;
    std::optional<PressureCommand> pressure;
  };
  struct EntryStreams {
    RngStream delay;
    RngStream fail;
    RngStream perf;
  };

  void schedule_commands();
  void process(const SimEvent& ev);
  void apply(const Command& cmd);
  void on_queued(const PilotRecord& pilot);
  EntryStreams& streams(const std::string& entry_id);
  void log(ordered_json line);

  Scenario scenario_;
  Factory factory_;
  Runner runner_;
  ResultStore store_;
  EventQueue queue_;
  SimTime now_ = 0.0;
  std::vector<Command> commands_;
  std::size_t next_command_ = 0;
  std::optional<SimTime> periodic_done_;
  std::map<std::string, EntryStreams> streams_;
  std::map<std::string, PilotOutcome> outcomes_;  // running pilots
  std::vector<StreamDiagnostic> diagnostics_;
  std::vector<std::string> trace_;
  std::uint64_t events_processed_ = 0;
  EventObserver observer_;
};

}  // namespace glidebench
