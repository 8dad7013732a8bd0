#include "glidebench/decision.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace glidebench {

namespace {

void check_candidates(const std::vector<Candidate>& candidates) {
  std::set<std::string> ids;
  for (const auto& c : candidates) {
    if (!(c.score > 0.0)) throw std::invalid_argument("candidate " + c.entry_id + " score <= 0");
    if (c.cap < 0) throw std::invalid_argument("candidate " + c.entry_id + " cap < 0");
    if (!ids.insert(c.entry_id).second) {
      throw std::invalid_argument("duplicate candidate " + c.entry_id);
    }
  }
}

std::vector<Candidate> by_entry_id(std::vector<Candidate> candidates) {
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) { return a.entry_id < b.entry_id; });
  return candidates;
}

// Fills cost and throughput from the allocation, summing in entry_id order so
// identical allocations always produce identical totals.
void settle(ProvisionPlan& plan, const std::vector<Candidate>& candidates) {
  plan.total_cost = 0.0;
  plan.achieved_throughput = 0.0;
  for (const auto& c : by_entry_id(candidates)) {
    auto it = plan.allocation.find(c.entry_id);
    if (it == plan.allocation.end()) continue;
    plan.total_cost += static_cast<double>(it->second) * c.price_per_hour;
    plan.achieved_throughput += static_cast<double>(it->second) * c.score;
  }
}

}  // namespace

ordered_json to_json(const ProvisionPlan& plan) {
  ordered_json j;
  j["allocation"] = ordered_json::object();
  for (const auto& [entry, n] : plan.allocation) j["allocation"][entry] = n;
  j["total_cost"] = plan.total_cost;
  j["achieved_throughput"] = plan.achieved_throughput;
  j["feasible"] = plan.feasible;
  return j;
}

double price_performance(double price_per_hour, double score) {
  if (!(score > 0.0)) throw std::invalid_argument("price_performance needs score > 0");
  return price_per_hour / score;
}

Eligibility eligible_candidates(const std::vector<EntryScore>& scores, const FactoryConfig& config,
                                const std::map<std::string, std::int64_t>& in_flight, SimTime now,
                                double ttl_s) {
  std::map<std::string, const EntryScore*> by_entry;
  for (const auto& s : scores) by_entry[s.entry_id] = &s;

  std::vector<const EntryConfig*> entries;
  for (const auto& e : config.entries) entries.push_back(&e);
  std::sort(entries.begin(), entries.end(),
            [](const EntryConfig* a, const EntryConfig* b) { return a->entry_id < b->entry_id; });

  Eligibility out;
  for (const EntryConfig* e : entries) {
    if (!e->enabled) continue;
    auto it = by_entry.find(e->entry_id);
    if (it == by_entry.end() || it->second->age_s(now) > ttl_s || !(it->second->median_score > 0.0)) {
      out.unknown.push_back(e->entry_id);
      continue;
    }
    auto fl = in_flight.find(e->entry_id);
    const std::int64_t cap = e->max_pilots - (fl == in_flight.end() ? 0 : fl->second);
    if (cap <= 0) continue;
    out.candidates.push_back({e->entry_id, it->second->median_score, e->price_per_hour, cap});
  }
  return out;
}

ProvisionPlan plan_greedy(double demand, const std::vector<Candidate>& candidates) {
  if (!(demand > 0.0)) throw std::invalid_argument("demand must be > 0");
  check_candidates(candidates);

  std::vector<Candidate> order = candidates;
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    const double ra = price_performance(a.price_per_hour, a.score);
    const double rb = price_performance(b.price_per_hour, b.score);
    if (ra != rb) return ra < rb;
    return a.entry_id < b.entry_id;
  });

  ProvisionPlan plan;
  double remaining = demand;
  for (const auto& c : order) {
    if (remaining <= 0.0) break;
    const auto wanted = static_cast<std::int64_t>(std::ceil(remaining / c.score));
    const std::int64_t n = std::min(c.cap, wanted);
    if (n <= 0) continue;
    plan.allocation[c.entry_id] = n;
    remaining -= static_cast<double>(n) * c.score;
  }
  plan.feasible = remaining <= 0.0;
  settle(plan, candidates);
  return plan;
}

double allocation_space_size(const std::vector<Candidate>& candidates) {
  double size = 1.0;
  for (const auto& c : candidates) size *= static_cast<double>(std::max<std::int64_t>(c.cap, 0) + 1);
  return size;
}

bool same_cost(double a, double b) {
  return std::fabs(a - b) <= 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

ProvisionPlan plan_oracle(double demand, const std::vector<Candidate>& candidates) {
  if (!(demand > 0.0)) throw std::invalid_argument("demand must be > 0");
  check_candidates(candidates);
  const double space = allocation_space_size(candidates);
  if (space > kOracleSpaceBound) throw SearchSpaceExceeded(space, kOracleSpaceBound);

  const std::vector<Candidate> order = by_entry_id(candidates);
  const std::size_t k = order.size();
  std::vector<std::int64_t> counts(k, 0);

  bool found = false;
  std::vector<std::int64_t> best;
  double best_cost = 0.0;
  double best_tp = 0.0;

  // Mixed-radix counter with the last candidate as the fastest digit, so the
  // enumeration visits count vectors in lexicographic order and the first of
  // any tied set is kept.
  while (true) {
    double cost = 0.0;
    double tp = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      cost += static_cast<double>(counts[i]) * order[i].price_per_hour;
      tp += static_cast<double>(counts[i]) * order[i].score;
    }
    if (tp >= demand) {
      const bool better = !found || (!same_cost(cost, best_cost) && cost < best_cost) ||
                          (same_cost(cost, best_cost) && tp > best_tp);
      if (better) {
        found = true;
        best = counts;
        best_cost = cost;
        best_tp = tp;
      }
    }
    bool advanced = false;
    for (std::size_t digit = k; digit-- > 0;) {
      if (counts[digit] < order[digit].cap) {
        ++counts[digit];
        advanced = true;
        break;
      }
      counts[digit] = 0;
    }
    if (!advanced) break;
  }

  ProvisionPlan plan;
  if (!found) return plan;
  for (std::size_t i = 0; i < k; ++i) {
    if (best[i] > 0) plan.allocation[order[i].entry_id] = best[i];
  }
  plan.feasible = true;
  settle(plan, candidates);
  return plan;
}

std::string_view to_string(Preference p) {
  switch (p) {
    case Preference::first:
      return "first";
    case Preference::second:
      return "second";
    case Preference::tie:
      return "tie";
  }
  return "tie";
}

PreferenceReport preference_flip_check(const Candidate& first, const Candidate& second) {
  PreferenceReport r;
  r.first_ratio = price_performance(first.price_per_hour, first.score);
  r.second_ratio = price_performance(second.price_per_hour, second.score);
  if (first.score != second.score) {
    r.by_score = first.score > second.score ? Preference::first : Preference::second;
  }
  if (r.first_ratio != r.second_ratio) {
    r.by_ratio = r.first_ratio < r.second_ratio ? Preference::first : Preference::second;
  }
  return r;
}

}  // namespace glidebench
