#include "glidebench/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "glidebench/errors.hpp"

namespace glidebench {

namespace {

void parse_entry(const ordered_json& j, EntryConfig& cfg, FabricProfile& prof) {
  ObjectReader in(j, "scenario entry");
  cfg.entry_id = in.string("entry_id");
  cfg.site_name = in.string_or("site_name", "");
  cfg.cpu_model = in.string_or("cpu_model", "");
  cfg.price_per_hour = in.number("price_per_hour");
  cfg.max_pilots = in.integer("max_pilots");
  cfg.supports_containers = in.boolean_or("supports_containers", true);
  cfg.enabled = in.boolean_or("enabled", true);

  prof.entry_id = cfg.entry_id;
  prof.true_perf = in.number("true_perf");
  prof.perf_noise_cv = in.number_or("perf_noise_cv", 0.0);
  prof.queue_delay_median_s = in.number_or("queue_delay_median_s", 0.0);
  prof.queue_delay_sigma = in.number_or("queue_delay_sigma", 0.0);
  prof.failure_prob = in.number_or("failure_prob", 0.0);
  if (in.has("node")) {
    ObjectReader node(in.raw("node"), "scenario entry node");
    NodeDescriptor d;
    if (node.has("cores")) d.cores = node.integer("cores");
    if (node.has("memory_mb")) d.memory_mb = node.integer("memory_mb");
    if (node.has("disk_mb")) d.disk_mb = node.integer("disk_mb");
    if (node.has("gpus")) d.gpus = node.integer("gpus");
    if (node.has("cpu_model")) d.cpu_model = node.string("cpu_model");
    node.finish();
    prof.node = d;
  }
  in.finish();
}

CampaignTrigger parse_trigger(const ordered_json& j) {
  CampaignTrigger t;
  if (j.is_number()) {
    t.at = j.get<double>();
    return t;
  }
  ObjectReader in(j, "schedule campaign");
  t.at = in.number("at");
  if (in.has("spec_id")) t.spec_id = in.string("spec_id");
  if (in.has("mode")) {
    const auto text = in.string("mode");
    t.mode = parse_sampling_mode(text);
    if (!t.mode) throw ParseError("schedule campaign: unknown mode '" + text + "'");
  }
  in.finish();
  return t;
}

PressureCommand parse_pressure(const ordered_json& j) {
  ObjectReader in(j, "schedule pressure");
  PressureCommand p;
  p.at = in.number("at");
  p.client_id = in.string("client_id");
  p.entry_id = in.string("entry_id");
  p.requested = in.integer("requested");
  in.finish();
  return p;
}

const ordered_json& array_at(ObjectReader& in, const char* key, const char* context) {
  const auto& v = in.raw(key);
  if (!v.is_array()) throw ParseError(std::string(context) + ": '" + key + "' must be an array");
  return v;
}

}  // namespace

const FabricProfile* Scenario::profile(std::string_view entry_id) const {
  for (const auto& p : profiles) {
    if (p.entry_id == entry_id) return &p;
  }
  return nullptr;
}

Scenario scenario_from_json(const ordered_json& doc) {
  ObjectReader in(doc, "scenario");
  Scenario s;
  s.seed = static_cast<std::uint64_t>(in.integer("seed"));

  for (const auto& e : array_at(in, "entries", "scenario")) {
    EntryConfig cfg;
    FabricProfile prof;
    parse_entry(e, cfg, prof);
    s.factory.entries.push_back(std::move(cfg));
    s.profiles.push_back(std::move(prof));
  }
  for (const auto& sp : array_at(in, "specs", "scenario")) s.specs.push_back(spec_from_json(sp));
  s.policy = policy_from_json(in.raw("policies"));

  if (in.has("factory")) {
    ObjectReader f(in.raw("factory"), "scenario factory");
    s.factory.benchmarks_enabled = f.boolean_or("benchmarks_enabled", false);
    s.factory.cycle_period_s = f.number_or("cycle_period_s", 60.0);
    s.factory.max_submit_per_cycle = f.integer_or("max_submit_per_cycle", 100);
    s.user_pilot_runtime_s = f.number_or("user_pilot_runtime_s", s.user_pilot_runtime_s);
    f.finish();
  }
  if (in.has("collector")) {
    ObjectReader c(in.raw("collector"), "scenario collector");
    const auto window = c.integer_or("window", static_cast<std::int64_t>(kDefaultWindow));
    if (window < 1) throw ValidationError({"collector window must be >= 1"});
    s.aggregate.window = static_cast<std::size_t>(window);
    s.aggregate.half_life_s = c.number_or("half_life_s", kDefaultHalfLifeS);
    s.score_ttl_s = c.number_or("ttl_s", kDefaultScoreTtlS);
    c.finish();
  }
  if (in.has("schedule")) {
    ObjectReader sch(in.raw("schedule"), "scenario schedule");
    s.runner_wake_s = sch.number_or("runner_wake_s", s.runner_wake_s);
    if (sch.has("campaigns")) {
      for (const auto& t : array_at(sch, "campaigns", "schedule")) s.campaigns.push_back(parse_trigger(t));
    }
    if (sch.has("campaign_every_s")) s.campaign_every_s = sch.number("campaign_every_s");
    if (sch.has("pressure")) {
      for (const auto& p : array_at(sch, "pressure", "schedule")) s.pressure.push_back(parse_pressure(p));
    }
    sch.finish();
  }
  if (in.has("demand")) {
    ObjectReader d(in.raw("demand"), "scenario demand");
    DemandSpec demand;
    demand.throughput = d.number("throughput");
    demand.spec_id = d.string_or("spec_id", s.policy.spec_id);
    d.finish();
    s.demand = demand;
  }
  in.finish();

  std::vector<std::string> v = validate_factory_config(s.factory);
  for (const auto& p : s.profiles) {
    for (auto& msg : validate_fabric_profile(p)) v.push_back("entry '" + p.entry_id + "': " + msg);
  }
  std::set<std::string> spec_ids;
  for (const auto& sp : s.specs) {
    for (auto& msg : validate_benchmark_spec(sp)) v.push_back("spec '" + sp.spec_id + "': " + msg);
    if (!spec_ids.insert(sp.spec_id).second) v.push_back("duplicate spec_id '" + sp.spec_id + "'");
  }
  if (!spec_ids.contains(s.policy.spec_id)) {
    v.push_back("policies.spec_id '" + s.policy.spec_id + "' is not a declared spec");
  }
  if (!(s.user_pilot_runtime_s > 0.0)) v.emplace_back("user_pilot_runtime_s must be > 0");
  if (!(s.runner_wake_s > 0.0)) v.emplace_back("runner_wake_s must be > 0");
  if (!(s.aggregate.half_life_s > 0.0)) v.emplace_back("half_life_s must be > 0");
  if (!(s.score_ttl_s > 0.0)) v.emplace_back("ttl_s must be > 0");
  if (s.campaign_every_s && !(*s.campaign_every_s > 0.0)) v.emplace_back("campaign_every_s must be > 0");
  for (const auto& t : s.campaigns) {
    if (!(t.at >= 0.0)) v.emplace_back("campaign time must be >= 0");
    if (t.spec_id && !spec_ids.contains(*t.spec_id)) v.push_back("campaign spec '" + *t.spec_id + "' unknown");
  }
  for (const auto& p : s.pressure) {
    if (!(p.at >= 0.0)) v.emplace_back("pressure time must be >= 0");
    if (p.requested < 0) v.emplace_back("pressure requested must be >= 0");
  }
  if (s.demand) {
    if (!(s.demand->throughput > 0.0)) v.emplace_back("demand throughput must be > 0");
    if (!spec_ids.contains(s.demand->spec_id)) v.push_back("demand spec '" + s.demand->spec_id + "' unknown");
  }
  if (!v.empty()) throw ValidationError(std::move(v));
  return s;
}

Scenario load_scenario(std::string_view text) { return scenario_from_json(parse_json_text(text)); }

Scenario load_scenario_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open scenario " + p.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return load_scenario(buf.str());
}

ordered_json to_json(const Scenario& s) {
  ordered_json j;
  j["seed"] = s.seed;
  j["entries"] = ordered_json::array();
  for (std::size_t i = 0; i < s.factory.entries.size(); ++i) {
    ordered_json e = to_json(s.factory.entries[i]);
    const FabricProfile& p = s.profiles[i];
    e["true_perf"] = p.true_perf;
    e["perf_noise_cv"] = p.perf_noise_cv;
    e["queue_delay_median_s"] = p.queue_delay_median_s;
    e["queue_delay_sigma"] = p.queue_delay_sigma;
    e["failure_prob"] = p.failure_prob;
    if (p.node) {
      ordered_json n = ordered_json::object();
      if (p.node->cores) n["cores"] = *p.node->cores;
      if (p.node->memory_mb) n["memory_mb"] = *p.node->memory_mb;
      if (p.node->disk_mb) n["disk_mb"] = *p.node->disk_mb;
      if (p.node->gpus) n["gpus"] = *p.node->gpus;
      if (p.node->cpu_model) n["cpu_model"] = *p.node->cpu_model;
      e["node"] = n;
    }
    j["entries"].push_back(e);
  }
  j["specs"] = ordered_json::array();
  for (const auto& sp : s.specs) j["specs"].push_back(to_json(sp));
  j["policies"] = to_json(s.policy);
  j["factory"] = {{"benchmarks_enabled", s.factory.benchmarks_enabled},
                  {"cycle_period_s", s.factory.cycle_period_s},
                  {"max_submit_per_cycle", s.factory.max_submit_per_cycle},
                  {"user_pilot_runtime_s", s.user_pilot_runtime_s}};
  j["collector"] = {{"window", s.aggregate.window},
                    {"half_life_s", s.aggregate.half_life_s},
                    {"ttl_s", s.score_ttl_s}};
  ordered_json sch;
  sch["runner_wake_s"] = s.runner_wake_s;
  sch["campaigns"] = ordered_json::array();
  for (const auto& t : s.campaigns) {
    ordered_json tj;
    tj["at"] = t.at;
    if (t.spec_id) tj["spec_id"] = *t.spec_id;
    if (t.mode) tj["mode"] = std::string(to_string(*t.mode));
    sch["campaigns"].push_back(tj);
  }
  if (s.campaign_every_s) sch["campaign_every_s"] = *s.campaign_every_s;
  sch["pressure"] = ordered_json::array();
  for (const auto& p : s.pressure) {
    ordered_json pj;
    pj["at"] = p.at;
    pj["client_id"] = p.client_id;
    pj["entry_id"] = p.entry_id;
    pj["requested"] = p.requested;
    sch["pressure"].push_back(pj);
  }
  j["schedule"] = sch;
  if (s.demand) j["demand"] = {{"throughput", s.demand->throughput}, {"spec_id", s.demand->spec_id}};
  return j;
}

}  // namespace glidebench
