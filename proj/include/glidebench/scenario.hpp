#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "glidebench/codec.hpp"
#include "glidebench/collector.hpp"
#include "glidebench/decision.hpp"
#include "glidebench/fabricsim.hpp"
#include "glidebench/factory.hpp"
#include "glidebench/runner.hpp"

namespace glidebench {

struct CampaignTrigger {
  SimTime at = 0.0;
  std::optional<std::string> spec_id;  // defaults to the scenario policy
  std::optional<SamplingMode> mode;

  bool operator==(const CampaignTrigger&) const = default;
};

struct PressureCommand {
  SimTime at = 0.0;
  std::string client_id;
  std::string entry_id;
  std::int64_t requested = 0;

  bool operator==(const PressureCommand&) const = default;
};

struct DemandSpec {
  double throughput = 0.0;
  std::string spec_id;

  bool operator==(const DemandSpec&) const = default;
};

// A complete, validated simulation input. See README.md for the file
// layout; every object rejects unknown keys.
struct Scenario {
  std::uint64_t seed = 0;
  FactoryConfig factory;
  std::vector<FabricProfile> profiles;  // one per entry, same order
  std::vector<BenchmarkSpec> specs;
  RunnerPolicy policy;
  double user_pilot_runtime_s = 3600.0;
  double runner_wake_s = 300.0;
  AggregateOptions aggregate;
  double score_ttl_s = kDefaultScoreTtlS;
  std::vector<CampaignTrigger> campaigns;
  std::optional<double> campaign_every_s;
  std::vector<PressureCommand> pressure;
  std::optional<DemandSpec> demand;

  const FabricProfile* profile(std::string_view entry_id) const;
  bool operator==(const Scenario&) const = default;
};

Scenario scenario_from_json(const ordered_json& doc);        // ParseError / ValidationError
Scenario load_scenario(std::string_view text);                // ParseError / ValidationError
Scenario load_scenario_file(const std::filesystem::path& p);  // + IoError
ordered_json to_json(const Scenario& scenario);

}  // namespace glidebench
