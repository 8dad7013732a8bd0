#include "glidebench/collector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "glidebench/checksum.hpp"
#include "glidebench/codec.hpp"
#include "glidebench/errors.hpp"
#include "glidebench/pilot.hpp"

namespace glidebench {

namespace {

bool is_lower_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }

constexpr std::size_t kDigestHexLen = 64;

std::string_view end_digest(std::string_view line) {
  return line.substr(kEndPrefix.size(), kDigestHexLen);
}

}  // namespace

bool is_end_sentinel(std::string_view line) {
  if (line.size() != kEndPrefix.size() + kDigestHexLen + 1) return false;
  if (line.substr(0, kEndPrefix.size()) != kEndPrefix || line.back() != '=') return false;
  return std::all_of(line.begin() + kEndPrefix.size(), line.end() - 1, is_lower_hex);
}

ParsedStream parse_stream(std::span<const std::string> lines) {
  ParsedStream out;
  auto diag = [&out](std::size_t idx, std::string code, std::string detail = {}) {
    out.diagnostics.push_back({idx + 1, std::move(code), std::move(detail)});
  };

  std::size_t i = 0;
  const std::size_t n = lines.size();
  while (i < n) {
    const std::string& line = lines[i];
    if (line != kBlockBegin) {
      if (line.rfind(kEndPrefix, 0) == 0) diag(i, "unexpected_end", "END sentinel without BEGIN");
      ++i;
      continue;
    }
    if (i + 1 >= n || lines[i + 1] == kBlockBegin) {
      diag(i, "truncated_block", "BEGIN sentinel without payload");
      ++i;
      continue;
    }
    if (i + 2 >= n || lines[i + 2] == kBlockBegin) {
      diag(i + 1, "truncated_block", "payload without END sentinel");
      i += 2;
      continue;
    }
    const std::string& payload = lines[i + 1];
    const std::string& end = lines[i + 2];
    if (!is_end_sentinel(end)) {
      diag(i + 2, "malformed_end", "line after payload is not an END sentinel");
      i += 3;
      continue;
    }
    if (sha256_hex(payload) != end_digest(end)) {
      diag(i + 2, "checksum_mismatch");
      i += 3;
      continue;
    }
    try {
      BenchmarkResult r = result_from_json(parse_json_text(payload));
      if (auto bad = validate_benchmark_result(r); !bad.empty()) {
        diag(i + 1, "payload_invalid", bad.front());
      } else {
        out.results.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      diag(i + 1, "payload_invalid", e.what());
    }
    i += 3;
  }
  return out;
}

std::string_view to_string(IngestStatus status) {
  switch (status) {
    case IngestStatus::accepted:
      return "accepted";
    case IngestStatus::duplicate:
      return "duplicate";
    case IngestStatus::invalid:
      return "invalid";
  }
  return "unknown";
}

IngestStatus ResultStore::ingest(const BenchmarkResult& result) {
  const BenchmarkSpec* spec = nullptr;
  for (const auto& s : specs_) {
    if (s.spec_id == result.spec_id) spec = &s;
  }
  if (!validate_benchmark_result(result, spec).empty()) return IngestStatus::invalid;
  if (!seen_.emplace(result.pilot_id, result.spec_id).second) return IngestStatus::duplicate;
  index_[{result.entry_id, result.spec_id}].push_back(results_.size());
  results_.push_back(result);
  return IngestStatus::accepted;
}

const std::vector<std::size_t>& ResultStore::indices(const std::string& entry_id,
                                                     const std::string& spec_id) const {
  static const std::vector<std::size_t> kEmpty;
  auto it = index_.find({entry_id, spec_id});
  return it == index_.end() ? kEmpty : it->second;
}

std::vector<std::string> ResultStore::entries_for(const std::string& spec_id) const {
  std::set<std::string> ids;
  for (const auto& [key, idx] : index_) {
    if (key.second == spec_id) ids.insert(key.first);
  }
  return {ids.begin(), ids.end()};
}

std::vector<std::string> ResultStore::spec_ids() const {
  std::set<std::string> ids;
  for (const auto& [key, idx] : index_) ids.insert(key.second);
  return {ids.begin(), ids.end()};
}

double EntryScore::staleness_weight(SimTime now) const {
  return std::exp2(-age_s(now) / half_life_s);
}

ordered_json to_json(const EntryScore& score, SimTime now) {
  ordered_json j;
  j["entry_id"] = score.entry_id;
  j["spec_id"] = score.spec_id;
  j["median_score"] = score.median_score;
  j["n_samples"] = score.n_samples;
  j["last_ts"] = score.last_ts;
  j["age_s"] = score.age_s(now);
  j["staleness_weight"] = score.staleness_weight(now);
  return j;
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

std::optional<EntryScore> aggregate(const ResultStore& store, const std::string& entry_id,
                                    const std::string& spec_id, const AggregateOptions& opts) {
  std::vector<std::size_t> ok;
  for (std::size_t idx : store.indices(entry_id, spec_id)) {
    if (store.results()[idx].exit_code == 0) ok.push_back(idx);
  }
  if (ok.empty() || opts.window == 0) return std::nullopt;

  const auto& all = store.results();
  // Newest first; among equal start times the later ingest is newer.
  std::stable_sort(ok.begin(), ok.end(), [&all](std::size_t a, std::size_t b) {
    if (all[a].started_at != all[b].started_at) return all[a].started_at > all[b].started_at;
    return a > b;
  });
  if (ok.size() > opts.window) ok.resize(opts.window);

  std::vector<double> scores;
  scores.reserve(ok.size());
  for (std::size_t idx : ok) scores.push_back(all[idx].score);

  EntryScore s;
  s.entry_id = entry_id;
  s.spec_id = spec_id;
  s.median_score = median_of(std::move(scores));
  s.n_samples = static_cast<std::int64_t>(ok.size());
  s.last_ts = all[ok.front()].started_at;
  s.half_life_s = opts.half_life_s;
  return s;
}

std::vector<EntryScore> aggregate_all(const ResultStore& store, const std::string& spec_id,
                                      const AggregateOptions& opts) {
  std::vector<EntryScore> out;
  for (const auto& entry : store.entries_for(spec_id)) {
    if (auto s = aggregate(store, entry, spec_id, opts)) out.push_back(std::move(*s));
  }
  return out;
}

std::string persist_text(const ResultStore& store) {
  std::string out;
  for (const auto& r : store.results()) {
    out += result_payload_line(r);
    out += '\n';
  }
  return out;
}

void persist(const ResultStore& store, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << persist_text(store);
  f.flush();
  if (!f) throw IoError("write failed for " + path.string());
}

LoadReport load_text(std::string_view text, std::vector<BenchmarkSpec> specs) {
  LoadReport report{ResultStore(std::move(specs)), {}};
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    try {
      const auto status = report.store.ingest(result_from_json(parse_json_text(line)));
      if (status != IngestStatus::accepted) {
        report.diagnostics.push_back({line_no, std::string(to_string(status)), {}});
      }
    } catch (const std::exception& e) {
      report.diagnostics.push_back({line_no, "unreadable", e.what()});
    }
  }
  return report;
}

LoadReport load(const std::filesystem::path& path, std::vector<BenchmarkSpec> specs) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  if (f.bad()) throw IoError("read failed for " + path.string());
  return load_text(buf.str(), std::move(specs));
}

}  // namespace glidebench
