#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <string_view>

#include "glidebench/domain.hpp"

namespace glidebench {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

// Parses JSON text, translating parser failures to ParseError with position.
ordered_json parse_json_text(std::string_view text);

// Strict reader over one JSON object: every key must be consumed before
// finish(), otherwise the unknown keys are reported.
class ObjectReader {
 public:
  ObjectReader(const ordered_json& obj, std::string context);
  ObjectReader(ordered_json&&, std::string) = delete;

  bool has(const char* key) const;
  std::string string(const char* key);
  std::string string_or(const char* key, std::string fallback);
  double number(const char* key);
  double number_or(const char* key, double fallback);
  std::int64_t integer(const char* key);
  std::int64_t integer_or(const char* key, std::int64_t fallback);
  bool boolean_or(const char* key, bool fallback);
  const ordered_json& raw(const char* key);
  void finish() const;

 private:
  const ordered_json& get(const char* key);

  const ordered_json& obj_;
  std::string context_;
  std::vector<std::string> seen_;
};

ordered_json to_json(const NodeInfo& node);
ordered_json to_json(const EntryConfig& cfg);
ordered_json to_json(const BenchmarkSpec& spec);
ordered_json to_json(const PilotRecord& pilot);

// Key order is fixed: schema_version, pilot_id, entry_id, spec_id, score,
// duration_s, started_at, node, exit_code.
ordered_json to_json(const BenchmarkResult& result);

// Single-line serialization used on the stderr channel and in results.jsonl.
std::string result_payload_line(const BenchmarkResult& result);

NodeInfo node_from_json(const ordered_json& j);
EntryConfig entry_config_from_json(const ordered_json& j);
BenchmarkSpec spec_from_json(const ordered_json& j);
BenchmarkResult result_from_json(const ordered_json& j);

// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

}  // namespace glidebench
