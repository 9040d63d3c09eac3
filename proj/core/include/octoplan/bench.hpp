#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "octoplan/dual_bit_planner.hpp"
#include "octoplan/planner.hpp"
#include "octoplan/scenario.hpp"

namespace octoplan {

enum class PlannerKind { Bit, DualBit, RrtConnect };

/// "bit", "2bit" or "rrtconnect".
const char* to_string(PlannerKind k) noexcept;
/// Throws std::invalid_argument for an unknown name.
PlannerKind parse_planner_kind(const std::string& name);
/// Comma-separated planner names.
std::vector<PlannerKind> parse_planner_list(const std::string& list);

struct PlannerOptions {
  std::size_t batch_size = 100;
  double p_nearest = 0.5;
  std::optional<double> rrt_step;
};

/// Runs one planner instance on the scenario's problem.
PlanResult run_planner(PlannerKind kind, const Scenario& scenario, std::uint64_t seed,
                       const Termination& stop, const PlannerOptions& opts = {},
                       const SolutionCallback& on_solution = {});

struct TracePoint {
  std::uint64_t iteration = 0;
  double elapsed_ms = 0.0;
  Cost cost;
};

struct BenchmarkRecord {
  std::string scenario;
  PlannerKind planner = PlannerKind::Bit;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::vector<TracePoint> trace;
  /// Final path, kept for post-hoc validation.
  std::optional<Path> path;

  bool solved() const noexcept { return !trace.empty(); }
};

struct BenchmarkConfig {
  std::vector<PlannerKind> planners;
  std::size_t trials = 1;
  Termination stop;
  /// seeds[trial]; must hold at least `trials` entries.
  std::vector<std::uint64_t> seeds;
  PlannerOptions options;
  /// Number of worker threads; records are still returned in (planner, trial) order.
  std::size_t jobs = 1;
};

/// Throws std::invalid_argument if trials < 1 or seeds are missing.
std::vector<BenchmarkRecord> run_benchmark(const Scenario& scenario, const BenchmarkConfig& cfg);

/// Column header, newline-terminated.
std::string csv_header();
/// One CSV line, newline-terminated. Unsolved rows leave cost fields empty.
std::string csv_row(const BenchmarkRecord& r);
void write_csv(std::ostream& out, const std::vector<BenchmarkRecord>& records);

/// Reads whitespace- or comma-separated unsigned seeds.
std::vector<std::uint64_t> read_seeds(std::istream& in);

/// `{ "cost": c, "states": [[..], ...] }`
std::string path_to_json(const Path& path);

}  // namespace octoplan
