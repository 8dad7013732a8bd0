// glidebench: run scenarios, inspect result stores, plan provisioning, serve the API.
//
// Exit codes: 0 success, 2 invalid input (flags, scenario, demand), 3 I/O.

#include <httplib.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "glidebench/api.hpp"
#include "glidebench/collector.hpp"
#include "glidebench/decision.hpp"
#include "glidebench/errors.hpp"
#include "glidebench/scenario.hpp"
#include "glidebench/simulation.hpp"

namespace fs = std::filesystem;
using namespace glidebench;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void print(std::ostream& out) const {
    std::vector<std::size_t> width(header.size());
    for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
    }
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) out << "  ";
        out << cells[c];
        if (c + 1 < cells.size()) out << std::string(width[c] - cells[c].size(), ' ');
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }

  // Cells are written verbatim, so parsing the CSV gives back the printed text.
  void write_csv(const fs::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (c) f << ',';
        const bool quote = cells[c].find_first_of(",\"\n") != std::string::npos;
        if (!quote) {
          f << cells[c];
          continue;
        }
        f << '"';
        for (char ch : cells[c]) f << (ch == '"' ? "\"\"" : std::string(1, ch));
        f << '"';
      }
      f << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    if (!f) throw IoError("cannot write " + path.string());
  }
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write " + path.string());
  f << text;
  if (!f) throw IoError("cannot write " + path.string());
}

Scenario read_scenario(const std::string& path) {
  // A scenario that cannot be found is reported as invalid input, not I/O.
  if (!fs::is_regular_file(path)) throw ValidationError({"scenario file not found: " + path});
  return load_scenario_file(path);
}

LoadReport read_store(const std::string& path, const std::vector<BenchmarkSpec>& specs) {
  LoadReport report = load(path, specs);
  for (const auto& d : report.diagnostics) {
    std::cerr << "store line " << d.line << ": " << d.code << " " << d.detail << '\n';
  }
  return report;
}

SimTime newest_start(const ResultStore& store) {
  SimTime t = 0.0;
  for (const auto& r : store.results()) t = std::max(t, r.started_at);
  return t;
}

std::string default_spec(const ResultStore& store) {
  const auto ids = store.spec_ids();
  return ids.empty() ? std::string() : ids.front();
}

// ---- run

struct RunArgs {
  std::string scenario;
  double duration = 0.0;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

int cmd_run(const RunArgs& a) {
  Scenario sc = read_scenario(a.scenario);
  if (a.seed) sc.seed = *a.seed;
  if (!(a.duration >= 0.0)) throw ValidationError({"--duration must be >= 0"});

  Simulation sim(std::move(sc));
  sim.advance_to(a.duration);

  std::error_code ec;
  fs::create_directories(a.out, ec);
  if (ec) throw IoError("cannot create " + a.out + ": " + ec.message());
  const fs::path out(a.out);
  persist(sim.store(), out / "results.jsonl");
  std::string trace;
  for (const auto& line : sim.trace()) trace += line + '\n';
  write_file(out / "trace.jsonl", trace);
  write_file(out / "summary.json", sim.summary().dump(2) + '\n');

  std::cout << "simulated " << format_number(sim.now()) << " s, " << sim.events_processed()
            << " events, " << sim.store().size() << " results, " << sim.runner().campaigns().size()
            << " campaigns\n";
  return 0;
}

// ---- scores

struct QueryArgs {
  std::string store;
  std::string scenario;
  std::string spec;
  std::string entry;
  std::string csv;
  double demand = 0.0;
  std::int64_t limit = 0;
};

int cmd_scores(const QueryArgs& a) {
  std::optional<Scenario> sc;
  if (!a.scenario.empty()) sc = read_scenario(a.scenario);
  const LoadReport rep = read_store(a.store, sc ? sc->specs : std::vector<BenchmarkSpec>{});
  const std::string spec = a.spec.empty() ? default_spec(rep.store) : a.spec;
  const SimTime now = newest_start(rep.store);
  AggregateOptions opts = sc ? sc->aggregate : AggregateOptions{};

  struct Row {
    EntryScore s;
    std::optional<double> price;
  };
  std::vector<Row> rows;
  for (auto& s : aggregate_all(rep.store, spec, opts)) {
    Row r{s, std::nullopt};
    if (sc) {
      if (const EntryConfig* e = sc->factory.find(s.entry_id)) r.price = e->price_per_hour;
    }
    rows.push_back(std::move(r));
  }
  if (sc) {
    // Priced entries by ascending price/score, unpriced ones after, entry_id ties.
    std::stable_sort(rows.begin(), rows.end(), [](const Row& x, const Row& y) {
      if (x.price.has_value() != y.price.has_value()) return x.price.has_value();
      if (x.price) {
        const double rx = price_performance(*x.price, x.s.median_score);
        const double ry = price_performance(*y.price, y.s.median_score);
        if (rx != ry) return rx < ry;
      }
      return x.s.entry_id < y.s.entry_id;
    });
  }

  Table t;
  t.header = {"entry_id", "spec_id", "median_score", "n_samples", "last_ts", "age_s", "staleness_weight"};
  if (sc) {
    t.header.push_back("price_per_hour");
    t.header.push_back("price_performance");
  }
  for (const auto& r : rows) {
    std::vector<std::string> cells = {r.s.entry_id,
                                      r.s.spec_id,
                                      format_number(r.s.median_score),
                                      std::to_string(r.s.n_samples),
                                      format_number(r.s.last_ts),
                                      format_number(r.s.age_s(now)),
                                      format_number(r.s.staleness_weight(now))};
    if (sc) {
      cells.push_back(r.price ? format_number(*r.price) : "");
      cells.push_back(r.price ? format_number(price_performance(*r.price, r.s.median_score)) : "");
    }
    t.rows.push_back(std::move(cells));
  }
  t.print(std::cout);
  if (!a.csv.empty()) t.write_csv(a.csv);
  return 0;
}

// ---- results

int cmd_results(const QueryArgs& a) {
  const LoadReport rep = read_store(a.store, {});
  const auto& all = rep.store.results();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!a.entry.empty() && all[i].entry_id != a.entry) continue;
    if (!a.spec.empty() && all[i].spec_id != a.spec) continue;
    idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&all](std::size_t x, std::size_t y) {
    if (all[x].started_at != all[y].started_at) return all[x].started_at > all[y].started_at;
    return x > y;
  });
  if (a.limit > 0 && idx.size() > static_cast<std::size_t>(a.limit)) idx.resize(static_cast<std::size_t>(a.limit));

  Table t;
  t.header = {"pilot_id", "entry_id", "spec_id", "score", "duration_s", "started_at", "cpu_model", "exit_code"};
  for (std::size_t i : idx) {
    const auto& r = all[i];
    t.rows.push_back({r.pilot_id, r.entry_id, r.spec_id, format_number(r.score), format_number(r.duration_s),
                      format_number(r.started_at), r.node.cpu_model, std::to_string(r.exit_code)});
  }
  t.print(std::cout);
  if (!a.csv.empty()) t.write_csv(a.csv);
  return 0;
}

// ---- plan

int cmd_plan(const QueryArgs& a) {
  if (!(a.demand > 0.0)) throw ValidationError({"--demand must be > 0"});
  const Scenario sc = read_scenario(a.scenario);
  const LoadReport rep = read_store(a.store, sc.specs);
  const std::string spec = a.spec.empty() ? sc.policy.spec_id : a.spec;
  const SimTime now = newest_start(rep.store);

  // Offline planning: nothing is in flight, caps are the configured max_pilots.
  const Eligibility el = eligible_candidates(aggregate_all(rep.store, spec, sc.aggregate), sc.factory, {},
                                             now, sc.score_ttl_s);
  const ProvisionPlan greedy = plan_greedy(a.demand, el.candidates);
  std::optional<ProvisionPlan> oracle;
  if (allocation_space_size(el.candidates) <= kOracleSpaceBound) oracle = plan_oracle(a.demand, el.candidates);

  Table t;
  t.header = {"planner", "entry_id", "count", "score", "price_per_hour", "price_performance"};
  auto add_plan = [&](const char* name, const ProvisionPlan& p) {
    for (const auto& c : el.candidates) {
      auto it = p.allocation.find(c.entry_id);
      if (it == p.allocation.end()) continue;
      t.rows.push_back({name, c.entry_id, std::to_string(it->second), format_number(c.score),
                        format_number(c.price_per_hour), format_number(price_performance(c.price_per_hour, c.score))});
    }
  };
  add_plan("greedy", greedy);
  if (oracle) add_plan("oracle", *oracle);

  Table totals;
  totals.header = {"planner", "total_cost", "achieved_throughput", "feasible", "gap_pct"};
  std::string gap;
  if (oracle && greedy.feasible && oracle->feasible && oracle->total_cost > 0.0) {
    gap = fixed(100.0 * (greedy.total_cost - oracle->total_cost) / oracle->total_cost, 1);
  } else if (oracle && greedy.feasible && oracle->feasible) {
    gap = greedy.total_cost == 0.0 ? fixed(0.0, 1) : "";
  }
  totals.rows.push_back({"greedy", fixed(greedy.total_cost, 2), format_number(greedy.achieved_throughput),
                         greedy.feasible ? "true" : "false", gap});
  if (oracle) {
    totals.rows.push_back({"oracle", fixed(oracle->total_cost, 2), format_number(oracle->achieved_throughput),
                           oracle->feasible ? "true" : "false", ""});
  }

  std::cout << "demand " << format_number(a.demand) << " spec " << spec << "\n\n";
  t.print(std::cout);
  std::cout << '\n';
  totals.print(std::cout);
  if (!oracle) std::cout << "\noracle skipped: allocation space exceeds " << format_number(kOracleSpaceBound) << '\n';
  if (!gap.empty()) std::cout << "\ngap " << gap << "%\n";
  if (!el.unknown.empty()) {
    std::cout << "\nunknown (no fresh score):";
    for (const auto& u : el.unknown) std::cout << ' ' << u;
    std::cout << '\n';
  }
  if (!a.csv.empty()) totals.write_csv(a.csv);
  return 0;
}

// ---- serve

struct ServeArgs {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string host = "127.0.0.1";
  int port = 8080;
};

int cmd_serve(const ServeArgs& a) {
  Scenario sc = read_scenario(a.scenario);
  if (a.seed) sc.seed = *a.seed;
  Simulation sim(std::move(sc));
  ApiService api(sim);
  httplib::Server server;
  api.bind(server);
  std::cout << "listening on http://" << a.host << ':' << a.port << kApiPrefix << std::endl;
  if (!server.listen(a.host, a.port)) throw IoError("cannot listen on " + a.host + ":" + std::to_string(a.port));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glidebench: pilot factory benchmark simulator"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a scenario and write results.jsonl, trace.jsonl, summary.json");
  run->add_option("--scenario", run_args.scenario, "Scenario JSON file")->required();
  run->add_option("--duration", run_args.duration, "Simulated seconds")->required();
  run->add_option("--seed", run_args.seed, "Override the scenario seed");
  run->add_option("--out", run_args.out, "Output directory");

  QueryArgs scores_args;
  auto* scores = app.add_subcommand("scores", "Per-entry aggregated scores from a result store");
  scores->add_option("--store", scores_args.store, "results.jsonl")->required();
  scores->add_option("--scenario", scores_args.scenario, "Scenario supplying prices and aggregation settings");
  scores->add_option("--spec", scores_args.spec, "Benchmark spec id");
  scores->add_option("--csv", scores_args.csv, "Also write the table as CSV");

  QueryArgs results_args;
  auto* results = app.add_subcommand("results", "Stored results, newest first");
  results->add_option("--store", results_args.store, "results.jsonl")->required();
  results->add_option("--entry", results_args.entry, "Filter by entry id");
  results->add_option("--spec", results_args.spec, "Filter by spec id");
  results->add_option("--limit", results_args.limit, "Maximum rows")->check(CLI::PositiveNumber);
  results->add_option("--csv", results_args.csv, "Also write the table as CSV");

  QueryArgs plan_args;
  auto* plan = app.add_subcommand("plan", "Greedy and oracle provisioning plans for a demand");
  plan->add_option("--store", plan_args.store, "results.jsonl")->required();
  plan->add_option("--scenario", plan_args.scenario, "Scenario supplying prices and caps")->required();
  plan->add_option("--demand", plan_args.demand, "Throughput demand, work-units/s")->required();
  plan->add_option("--spec", plan_args.spec, "Benchmark spec id");
  plan->add_option("--csv", plan_args.csv, "Also write the totals as CSV");

  ServeArgs serve_args;
  auto* serve = app.add_subcommand("serve", "Serve the REST API over a live simulation");
  serve->add_option("--scenario", serve_args.scenario, "Scenario JSON file")->required();
  serve->add_option("--seed", serve_args.seed, "Override the scenario seed");
  serve->add_option("--host", serve_args.host, "Bind address");
  serve->add_option("--port", serve_args.port, "Port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*scores) return cmd_scores(scores_args);
    if (*results) return cmd_results(results_args);
    if (*plan) return cmd_plan(plan_args);
    if (*serve) return cmd_serve(serve_args);
  } catch (const ValidationError& e) {
    std::cerr << "invalid input:\n";
    for (const auto& v : e.violations()) std::cerr << "  " << v << '\n';
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
