#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "glidebench/domain.hpp"

namespace glidebench {

struct StreamDiagnostic {
  std::size_t line = 0;  // 1-based
  std::string code;      // checksum_mismatch, malformed_end, truncated_block, ...
  std::string detail;

  bool operator==(const StreamDiagnostic&) const = default;
};

struct ParsedStream {
  std::vector<BenchmarkResult> results;
  std::vector<StreamDiagnostic> diagnostics;
};

// Recovers verified result blocks from a pilot's stderr. Lines outside blocks
// are ignored; every malformed or unverifiable block becomes a diagnostic.
ParsedStream parse_stream(std::span<const std::string> lines);

bool is_end_sentinel(std::string_view line);

enum class IngestStatus { accepted, duplicate, invalid };

std::string_view to_string(IngestStatus status);

// Append-only result store, deduplicated on (pilot_id, spec_id) and indexed by
// (entry_id, spec_id). When a spec catalog is supplied, successful results
// whose duration exceeds the spec timeout are rejected as invalid.
class ResultStore {
 public:
  ResultStore() = default;
  explicit ResultStore(std::vector<BenchmarkSpec> specs) : specs_(std::move(specs)) {}

  IngestStatus ingest(const BenchmarkResult& result);

  const std::vector<BenchmarkResult>& results() const { return results_; }
  std::size_t size() const { return results_.size(); }
  bool empty() const { return results_.empty(); }

  // Positions into results(), in ingest order.
  const std::vector<std::size_t>& indices(const std::string& entry_id,
                                          const std::string& spec_id) const;
  // Distinct entry ids that have at least one result for spec_id, sorted.
  std::vector<std::string> entries_for(const std::string& spec_id) const;
  std::vector<std::string> spec_ids() const;

 private:
  std::vector<BenchmarkSpec> specs_;
  std::vector<BenchmarkResult> results_;
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> index_;
  std::set<std::pair<std::string, std::string>> seen_;
};

inline constexpr std::size_t kDefaultWindow = 5;
inline constexpr double kDefaultHalfLifeS = 259200.0;  // 72 h

struct AggregateOptions {
  std::size_t window = kDefaultWindow;
  double half_life_s = kDefaultHalfLifeS;
  bool operator==(const AggregateOptions&) const = default;
};

struct EntryScore {
  std::string entry_id;
  std::string spec_id;
  double median_score = 0.0;
  std::int64_t n_samples = 0;
  SimTime last_ts = 0.0;
  double half_life_s = kDefaultHalfLifeS;

  double age_s(SimTime now) const { return now - last_ts; }
  // 2^(-age / half_life); 1 at age 0.
  double staleness_weight(SimTime now) const;

  bool operator==(const EntryScore&) const = default;
};

// {entry_id, spec_id, median_score, n_samples, last_ts, age_s, staleness_weight}
nlohmann::ordered_json to_json(const EntryScore& score, SimTime now);

double median_of(std::vector<double> values);

// Median of the most recent `window` successful samples, by started_at with
// later ingests winning ties. nullopt when the entry has no successes.
std::optional<EntryScore> aggregate(const ResultStore& store, const std::string& entry_id,
                                    const std::string& spec_id, const AggregateOptions& opts = {});

// Every entry with a score for spec_id, sorted by entry_id.
std::vector<EntryScore> aggregate_all(const ResultStore& store, const std::string& spec_id,
                                      const AggregateOptions& opts = {});

// JSON-Lines, one result per line in wire key order.
std::string persist_text(const ResultStore& store);
void persist(const ResultStore& store, const std::filesystem::path& path);  // throws IoError

struct LoadReport {
  ResultStore store;
  std::vector<StreamDiagnostic> diagnostics;
};

LoadReport load_text(std::string_view text, std::vector<BenchmarkSpec> specs = {});
LoadReport load(const std::filesystem::path& path, std::vector<BenchmarkSpec> specs = {});  // throws IoError

}  // namespace glidebench
