#include "octoplan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "octoplan/bit_planner.hpp"
#include "octoplan/rrt_connect.hpp"

namespace octoplan {

const char* to_string(PlannerKind k) noexcept {
  switch (k) {
    case PlannerKind::Bit:
      return "bit";
    case PlannerKind::DualBit:
      return "2bit";
    case PlannerKind::RrtConnect:
      return "rrtconnect";
  }
  return "?";
}

PlannerKind parse_planner_kind(const std::string& name) {
  if (name == "bit") return PlannerKind::Bit;
  if (name == "2bit") return PlannerKind::DualBit;
  if (name == "rrtconnect") return PlannerKind::RrtConnect;
  throw std::invalid_argument("unknown planner '" + name + "' (expected bit, 2bit or rrtconnect)");
}

std::vector<PlannerKind> parse_planner_list(const std::string& list) {
  std::vector<PlannerKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_planner_kind(item));
  }
  if (out.empty()) throw std::invalid_argument("empty planner list");
  return out;
}

PlanResult run_planner(PlannerKind kind, const Scenario& scenario, std::uint64_t seed,
                       const Termination& stop, const PlannerOptions& opts,
                       const SolutionCallback& on_solution) {
  switch (kind) {
    case PlannerKind::Bit: {
      BitPlannerConfig c;
      c.batch_size = opts.batch_size;
      BitPlanner p(scenario.problem(), seed, c);
      return p.plan(stop, on_solution);
    }
    case PlannerKind::DualBit: {
      DualBitConfig c;
      c.batch_size = opts.batch_size;
      c.strategy.p_nearest = opts.p_nearest;
      DualBitPlanner p(scenario.problem(), seed, c);
      return p.plan(stop, on_solution);
    }
    case PlannerKind::RrtConnect: {
      RrtConnectConfig c;
      c.step_size = opts.rrt_step;
      RrtConnectPlanner p(scenario.problem(), seed, c);
      return p.plan(stop, on_solution);
    }
  }
  throw std::logic_error("run_planner: bad planner kind");
}

std::vector<BenchmarkRecord> run_benchmark(const Scenario& scenario, const BenchmarkConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("run_benchmark: trials must be >= 1");
  if (cfg.seeds.size() < cfg.trials) {
    throw std::invalid_argument(fmt::format("run_benchmark: {} trials but only {} seeds",
                                            cfg.trials, cfg.seeds.size()));
  }
  if (cfg.planners.empty()) throw std::invalid_argument("run_benchmark: no planners");

  std::vector<BenchmarkRecord> records(cfg.planners.size() * cfg.trials);
  for (std::size_t p = 0; p < cfg.planners.size(); ++p) {
    for (std::size_t t = 0; t < cfg.trials; ++t) {
      auto& r = records[p * cfg.trials + t];
      r.scenario = scenario.name;
      r.planner = cfg.planners[p];
      r.seed = cfg.seeds[t];
      r.trial = t;
    }
  }

  auto run_one = [&](BenchmarkRecord& r) {
    PlanResult res = run_planner(r.planner, scenario, r.seed, cfg.stop, cfg.options);
    for (const auto& ev : res.improvements) {
      r.trace.push_back(TracePoint{ev.iteration, ev.elapsed_ms, ev.cost});
    }
    r.path = std::move(res.path);
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(cfg.jobs, records.size()));
  if (jobs == 1) {
    for (auto& r : records) run_one(r);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < records.size(); i = next++) run_one(records[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

std::string csv_header() {
  return "scenario,planner,seed,trial,iters_to_first,ms_to_first,first_cost,final_cost,"
         "n_improvements,trace\n";
}

std::string csv_row(const BenchmarkRecord& r) {
  std::string out = fmt::format("{},{},{},{},", r.scenario, to_string(r.planner), r.seed, r.trial);
  if (r.trace.empty()) return out + ",,,,0,\n";
  const auto& first = r.trace.front();
  out += fmt::format("{},{:.3f},{},{},{},", first.iteration, first.elapsed_ms, first.cost.value(),
                     r.trace.back().cost.value(), r.trace.size());
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt::format("{}:{}", r.trace[i].iteration, r.trace[i].cost.value());
  }
  return out + "\n";
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records) {
  out << csv_header();
  for (const auto& r : records) out << csv_row(r);
}

std::vector<std::uint64_t> read_seeds(std::istream& in) {
  std::vector<std::uint64_t> seeds;
  std::string tok;
  while (in >> tok) {
    std::stringstream parts(tok);
    std::string s;
    while (std::getline(parts, s, ',')) {
      if (s.empty()) continue;
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.front() == '-') {
        throw std::invalid_argument("seeds: '" + s + "' is not an unsigned integer");
      }
      seeds.push_back(v);
    }
  }
  return seeds;
}

std::string path_to_json(const Path& path) {
  std::string out = fmt::format("{{ \"cost\": {}, \"states\": [", path.cost.value());
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    if (i > 0) out += ", ";
    out += '[';
    for (std::size_t j = 0; j < path.states[i].dim(); ++j) {
      if (j > 0) out += ", ";
      out += fmt::format("{}", path.states[i][j]);
    }
    out += ']';
  }
  return out + "] }\n";
}

}  // namespace octoplan
