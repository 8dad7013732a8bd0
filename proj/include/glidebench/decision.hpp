#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "glidebench/collector.hpp"
#include "glidebench/factory.hpp"

namespace glidebench {

struct Candidate {
  std::string entry_id;
  double score = 0.0;  // work-units/second
  double price_per_hour = 0.0;
  std::int64_t cap = 0;

  bool operator==(const Candidate&) const = default;
};

struct ProvisionPlan {
  std::map<std::string, std::int64_t> allocation;  // counts >= 1 only
  double total_cost = 0.0;                         // USD/hour
  double achieved_throughput = 0.0;                // work-units/second
  bool feasible = false;

  bool operator==(const ProvisionPlan&) const = default;
};

// {allocation, total_cost, achieved_throughput, feasible}
ordered_json to_json(const ProvisionPlan& plan);

// price / score; lower is better. Throws std::invalid_argument for score <= 0.
double price_performance(double price_per_hour, double score);

inline constexpr double kDefaultScoreTtlS = 604800.0;  // 7 days

struct Eligibility {
  std::vector<Candidate> candidates;  // sorted by entry_id
  std::vector<std::string> unknown;   // enabled entries lacking a fresh score
};

// in_flight maps entry_id to queued+running pilots; missing entries count 0.
Eligibility eligible_candidates(const std::vector<EntryScore>& scores, const FactoryConfig& config,
                                const std::map<std::string, std::int64_t>& in_flight, SimTime now,
                                double ttl_s = kDefaultScoreTtlS);

// Greedy by ascending price_performance (entry_id breaks ties): take
// min(cap, ceil(remaining / score)) from each candidate until covered.
ProvisionPlan plan_greedy(double demand, const std::vector<Candidate>& candidates);

class SearchSpaceExceeded : public std::runtime_error {
 public:
  SearchSpaceExceeded(double size, double bound)
      : std::runtime_error("allocation space " + std::to_string(size) + " exceeds bound " +
                           std::to_string(bound)),
        size_(size),
        bound_(bound) {}
  double size() const noexcept { return size_; }
  double bound() const noexcept { return bound_; }

 private:
  double size_;
  double bound_;
};

inline constexpr double kOracleSpaceBound = 1.0e6;

// Product of (cap + 1) over candidates.
double allocation_space_size(const std::vector<Candidate>& candidates);

// Exhaustive search over every integer allocation within caps: minimum cost,
// then maximum throughput, then the lexicographically smallest count vector in
// entry_id order. Throws SearchSpaceExceeded past kOracleSpaceBound.
ProvisionPlan plan_oracle(double demand, const std::vector<Candidate>& candidates);

// True when two costs agree to within relative 1e-9.
bool same_cost(double a, double b);

enum class Preference { first, second, tie };

std::string_view to_string(Preference p);

struct PreferenceReport {
  Preference by_score = Preference::tie;  // higher score preferred
  Preference by_ratio = Preference::tie;  // lower price_performance preferred
  double first_ratio = 0.0;
  double second_ratio = 0.0;
};

PreferenceReport preference_flip_check(const Candidate& first, const Candidate& second);

}  // namespace glidebench
