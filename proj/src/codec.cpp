#include "glidebench/codec.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "glidebench/errors.hpp"

namespace glidebench {

ordered_json parse_json_text(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // Recover line/column from the byte offset.
    std::size_t line = 1, column = 1;
    const std::size_t limit = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < limit; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    // Drop nlohmann's own "[json.exception...] parse error at ...: " prefix.
    std::string what = e.what();
    if (auto pos = what.find(": "); what.rfind("[json.exception", 0) == 0 && pos != std::string::npos) {
      what.erase(0, pos + 2);
    }
    throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what,
                     e.byte, line, column);
  }
}

ObjectReader::ObjectReader(const ordered_json& obj, std::string context)
    : obj_(obj), context_(std::move(context)) {
  if (!obj_.is_object()) throw ParseError(context_ + ": expected a JSON object");
}

bool ObjectReader::has(const char* key) const { return obj_.contains(key); }

const ordered_json& ObjectReader::get(const char* key) {
  auto it = obj_.find(key);
  if (it == obj_.end()) throw ParseError(context_ + ": missing key '" + key + "'");
  seen_.emplace_back(key);
  return *it;
}

std::string ObjectReader::string(const char* key) {
  const auto& v = get(key);
  if (!v.is_string()) throw ParseError(context_ + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string ObjectReader::string_or(const char* key, std::string fallback) {
  return has(key) ? string(key) : std::move(fallback);
}

double ObjectReader::number(const char* key) {
  const auto& v = get(key);
  if (!v.is_number()) throw ParseError(context_ + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError(context_ + ": '" + key + "' must be finite");
  return d;
}

double ObjectReader::number_or(const char* key, double fallback) {
  return has(key) ? number(key) : fallback;
}

std::int64_t ObjectReader::integer(const char* key) {
  const auto& v = get(key);
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isfinite(d) && d == std::floor(d) && std::fabs(d) < 9.0e15) {
      return static_cast<std::int64_t>(d);
    }
  }
  throw ParseError(context_ + ": '" + key + "' must be an integer");
}

std::int64_t ObjectReader::integer_or(const char* key, std::int64_t fallback) {
  return has(key) ? integer(key) : fallback;
}

bool ObjectReader::boolean_or(const char* key, bool fallback) {
  if (!has(key)) return fallback;
  const auto& v = get(key);
  if (!v.is_boolean()) throw ParseError(context_ + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

const ordered_json& ObjectReader::raw(const char* key) { return get(key); }

void ObjectReader::finish() const {
  std::vector<std::string> unknown;
  for (auto it = obj_.begin(); it != obj_.end(); ++it) {
    if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end()) {
      unknown.push_back(it.key());
    }
  }
  if (!unknown.empty()) {
    std::string msg = context_ + ": unknown key(s)";
    for (const auto& k : unknown) msg += " '" + k + "'";
    throw ParseError(msg);
  }
}

ordered_json to_json(const NodeInfo& node) {
  ordered_json j;
  j["cores"] = node.cores;
  j["memory_mb"] = node.memory_mb;
  j["disk_mb"] = node.disk_mb;
  j["gpus"] = node.gpus;
  j["cpu_model"] = node.cpu_model;
  return j;
}

ordered_json to_json(const EntryConfig& cfg) {
  ordered_json j;
  j["entry_id"] = cfg.entry_id;
  j["site_name"] = cfg.site_name;
  j["cpu_model"] = cfg.cpu_model;
  j["price_per_hour"] = cfg.price_per_hour;
  j["max_pilots"] = cfg.max_pilots;
  j["supports_containers"] = cfg.supports_containers;
  j["enabled"] = cfg.enabled;
  return j;
}

ordered_json to_json(const BenchmarkSpec& spec) {
  ordered_json j;
  j["spec_id"] = spec.spec_id;
  j["name"] = spec.name;
  j["image_ref"] = spec.image_ref;
  j["work_units"] = spec.work_units;
  j["timeout_s"] = spec.timeout_s;
  return j;
}

ordered_json to_json(const PilotRecord& pilot) {
  auto opt_time = [](const std::optional<SimTime>& t) {
    return t ? ordered_json(*t) : ordered_json(nullptr);
  };
  ordered_json j;
  j["pilot_id"] = pilot.pilot_id;
  j["entry_id"] = pilot.entry_id;
  j["purpose"] = std::string(to_string(pilot.purpose));
  j["spec_id"] = pilot.spec_id ? ordered_json(*pilot.spec_id) : ordered_json(nullptr);
  j["state"] = std::string(to_string(pilot.state));
  j["submitted_at"] = opt_time(pilot.submitted_at);
  j["started_at"] = opt_time(pilot.started_at);
  j["finished_at"] = opt_time(pilot.finished_at);
  j["stderr_lines"] = pilot.stderr_lines;
  return j;
}

ordered_json to_json(const BenchmarkResult& r) {
  ordered_json j;
  j["schema_version"] = r.schema_version;
  j["pilot_id"] = r.pilot_id;
  j["entry_id"] = r.entry_id;
  j["spec_id"] = r.spec_id;
  j["score"] = r.score;
  j["duration_s"] = r.duration_s;
  j["started_at"] = r.started_at;
  j["node"] = to_json(r.node);
  j["exit_code"] = r.exit_code;
  return j;
}

std::string result_payload_line(const BenchmarkResult& result) {
  // dump() without indent never emits a raw newline; strings escape them.
  return to_json(result).dump();
}

NodeInfo node_from_json(const ordered_json& j) {
  ObjectReader in(j, "node");
  NodeInfo n;
  n.cores = in.integer("cores");
  n.memory_mb = in.integer("memory_mb");
  n.disk_mb = in.integer("disk_mb");
  n.gpus = in.integer("gpus");
  n.cpu_model = in.string("cpu_model");
  in.finish();
  return n;
}

EntryConfig entry_config_from_json(const ordered_json& j) {
  ObjectReader in(j, "entry");
  EntryConfig c;
  c.entry_id = in.string("entry_id");
  c.site_name = in.string_or("site_name", "");
  c.cpu_model = in.string_or("cpu_model", "");
  c.price_per_hour = in.number("price_per_hour");
  c.max_pilots = in.integer("max_pilots");
  c.supports_containers = in.boolean_or("supports_containers", true);
  c.enabled = in.boolean_or("enabled", true);
  in.finish();
  return c;
}

BenchmarkSpec spec_from_json(const ordered_json& j) {
  ObjectReader in(j, "spec");
  BenchmarkSpec s;
  s.spec_id = in.string("spec_id");
  s.name = in.string_or("name", s.spec_id);
  s.image_ref = in.string_or("image_ref", "");
  s.work_units = in.integer("work_units");
  s.timeout_s = in.integer("timeout_s");
  in.finish();
  return s;
}

BenchmarkResult result_from_json(const ordered_json& j) {
  ObjectReader in(j, "result");
  BenchmarkResult r;
  r.schema_version = static_cast<int>(in.integer("schema_version"));
  r.pilot_id = in.string("pilot_id");
  r.entry_id = in.string("entry_id");
  r.spec_id = in.string("spec_id");
  r.score = in.number("score");
  r.duration_s = in.number("duration_s");
  r.started_at = in.number("started_at");
  r.node = node_from_json(in.raw("node"));
  r.exit_code = static_cast<int>(in.integer("exit_code"));
  in.finish();
  return r;
}

std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

}  // namespace glidebench
