#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "glidebench/domain.hpp"

namespace testing {

inline std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

inline std::string fixture(const std::string& name) { return std::string(GLIDEBENCH_FIXTURES) + "/" + name; }

inline glidebench::BenchmarkResult sample_result(std::string pilot = "p-00000001", double score = 50.0,
                                                 double started = 0.0, std::string entry = "e1") {
  glidebench::BenchmarkResult r;
  r.pilot_id = std::move(pilot);
  r.entry_id = std::move(entry);
  r.spec_id = "s1";
  r.score = score;
  r.duration_s = 1000.0 / score;
  r.started_at = started;
  return r;
}

}  // namespace testing
