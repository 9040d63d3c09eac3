#include <algorithm>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "octoplan/bench.hpp"
#include "octoplan/grid_oracle.hpp"
#include "octoplan/map_builder.hpp"
#include "octoplan/octree.hpp"
#include "octoplan/render.hpp"
#include "octoplan/scenario.hpp"

namespace {

using namespace octoplan;

Termination make_stop(double budget_ms, std::optional<std::uint64_t> budget_iters) {
  Termination stop;
  stop.time_budget_ms = budget_ms;
  if (budget_iters) stop.max_iterations = *budget_iters;
  return stop;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PlanArgs {
  std::string scenario;
  std::string planner = "2bit";
  std::uint64_t seed = 1;
  double budget_ms = 1000.0;
  std::optional<std::uint64_t> budget_iters;
  double p_strategy1 = 0.5;
  std::size_t batch_size = 100;
  std::string out_path;
  std::string render;
};

int run_plan(const PlanArgs& a) {
  const Scenario s = load_scenario(a.scenario);
  PlannerOptions opts;
  opts.batch_size = a.batch_size;
  opts.p_nearest = a.p_strategy1;
  const PlannerKind kind = parse_planner_kind(a.planner);
  const PlanResult r = run_planner(kind, s, a.seed, make_stop(a.budget_ms, a.budget_iters), opts,
                                   [](const SolutionEvent& e) {
                                     spdlog::info("iter {} at {:.1f} ms: cost {}", e.iteration,
                                                  e.elapsed_ms, e.cost.value());
                                   });
  spdlog::info("{} iterations, {} batches, {} vertices, {:.1f} ms", r.stats.iterations,
               r.stats.batches, r.stats.vertices, r.stats.elapsed_ms);
  if (!r.solved()) {
    spdlog::warn("no solution found");
    if (!a.render.empty()) render_scene(s, std::nullopt, a.render);
    return 2;
  }
  write_text(a.out_path, path_to_json(*r.path) + "\n");
  if (!a.render.empty()) render_scene(s, r.path, a.render);
  std::cout << r.path->cost.value() << "\n";
  return 0;
}

struct BenchArgs {
  std::vector<std::string> scenarios;
  std::string planners = "rrtconnect,bit,2bit";
  std::size_t trials = 10;
  double budget_ms = 1000.0;
  std::optional<std::uint64_t> budget_iters;
  std::string seeds_file;
  std::string csv;
  std::size_t jobs = 1;
  double p_strategy1 = 0.5;
  std::size_t batch_size = 100;
};

int run_bench(const BenchArgs& a) {
  BenchmarkConfig cfg;
  cfg.planners = parse_planner_list(a.planners);
  cfg.trials = a.trials;
  cfg.stop = make_stop(a.budget_ms, a.budget_iters);
  cfg.jobs = a.jobs;
  cfg.options.batch_size = a.batch_size;
  cfg.options.p_nearest = a.p_strategy1;
  if (a.seeds_file.empty()) {
    for (std::size_t t = 0; t < a.trials; ++t) cfg.seeds.push_back(t + 1);
  } else {
    std::ifstream in(a.seeds_file);
    if (!in) throw std::runtime_error("cannot read " + a.seeds_file);
    cfg.seeds = read_seeds(in);
  }

  std::ofstream csv(a.csv, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + a.csv);
  csv << csv_header();

  std::cout << "scenario,planner,solved,median_iters_to_first,median_first_cost,median_final_cost\n";
  for (const auto& path : a.scenarios) {
    const Scenario s = load_scenario(path);
    const auto records = run_benchmark(s, cfg);
    for (const auto& r : records) csv << csv_row(r);

    std::map<PlannerKind, std::vector<const BenchmarkRecord*>> by_planner;
    for (const auto& r : records) by_planner[r.planner].push_back(&r);
    for (PlannerKind k : cfg.planners) {
      std::vector<double> iters;
      std::vector<double> first;
      std::vector<double> final_cost;
      for (const auto* r : by_planner[k]) {
        if (!r->solved()) continue;
        iters.push_back(static_cast<double>(r->trace.front().iteration));
        first.push_back(r->trace.front().cost.value());
        final_cost.push_back(r->trace.back().cost.value());
      }
      if (iters.empty()) {
        std::cout << fmt::format("{},{},0/{},,,\n", s.name, to_string(k), cfg.trials);
      } else {
        std::cout << fmt::format("{},{},{}/{},{},{:.6f},{:.6f}\n", s.name, to_string(k),
                                 iters.size(), cfg.trials, median(iters), median(first),
                                 median(final_cost));
      }
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-based motion planning on occupancy maps"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log solution events");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one query and write the path as JSON");
  plan_cmd->add_option("--scenario", plan.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--planner", plan.planner, "bit, 2bit or rrtconnect")
      ->check(CLI::IsMember({"bit", "2bit", "rrtconnect"}));
  plan_cmd->add_option("--seed", plan.seed);
  plan_cmd->add_option("--budget-ms", plan.budget_ms, "Wall-clock budget")->check(CLI::NonNegativeNumber);
  plan_cmd->add_option("--budget-iters", plan.budget_iters, "Iteration budget");
  plan_cmd->add_option("--p-strategy1", plan.p_strategy1, "Probability of nearest-node connection")
      ->check(CLI::Range(0.0, 1.0));
  plan_cmd->add_option("--batch-size", plan.batch_size)->check(CLI::PositiveNumber);
  plan_cmd->add_option("--out-path", plan.out_path, "Path JSON output")->required();
  plan_cmd->add_option("--render", plan.render, "SVG or PPM rendering of the result");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run planners over seeded trials and write CSV");
  bench_cmd->add_option("--scenario", bench.scenarios, "Scenario JSON (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--planners", bench.planners, "Comma-separated planner list");
  bench_cmd->add_option("--trials", bench.trials)->check(CLI::PositiveNumber);
  bench_cmd->add_option("--budget-ms", bench.budget_ms)->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--budget-iters", bench.budget_iters,
                        "Iteration budget; makes runs independent of machine speed");
  bench_cmd->add_option("--seeds-file", bench.seeds_file, "One seed per trial; defaults to 1..K");
  bench_cmd->add_option("--csv", bench.csv)->required();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--p-strategy1", bench.p_strategy1)->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--batch-size", bench.batch_size)->check(CLI::PositiveNumber);

  auto* map_cmd = app.add_subcommand("map", "Build or inspect voxel maps");
  map_cmd->require_subcommand(1);
  std::string script_path;
  std::string map_out;
  auto* build_cmd = map_cmd->add_subcommand("build", "Simulate a scan script into a .vox map");
  build_cmd->add_option("--script", script_path)->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--out", map_out)->required();

  std::string slice_map;
  double slice_height = 0.0;
  std::optional<double> slice_res;
  std::string slice_out;
  auto* slice_cmd = map_cmd->add_subcommand("slice", "Render a horizontal cross-section as SVG");
  slice_cmd->add_option("--map", slice_map)->required()->check(CLI::ExistingFile);
  slice_cmd->add_option("--height", slice_height)->required();
  slice_cmd->add_option("--resolution", slice_res, "Slice cell size; defaults to the map's");
  slice_cmd->add_option("--out", slice_out)->required();

  std::string oracle_scenario;
  double grid_res = 0.01;
  std::string oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle", "Grid Dijkstra reference cost");
  oracle_cmd->add_option("--scenario", oracle_scenario)->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--grid-res", grid_res)->required()->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--out-path", oracle_out, "Lattice path JSON output");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*plan_cmd) return run_plan(plan);
    if (*bench_cmd) return run_bench(bench);
    if (*build_cmd) {
      const OccupancyOctree map = build_map(load_map_script(script_path));
      map.save(map_out);
      spdlog::info("{} leaves written to {}", map.leaf_count(), map_out);
      return 0;
    }
    if (*slice_cmd) {
      const OccupancyOctree map = OccupancyOctree::load(slice_map);
      write_text(slice_out,
                 render_grid_svg(map.cross_section(slice_height, slice_res.value_or(map.resolution()))));
      return 0;
    }
    if (*oracle_cmd) {
      const Scenario s = load_scenario(oracle_scenario);
      const GridOracleResult r = grid_oracle(s, grid_res);
      if (!r.cost.is_finite()) {
        std::cout << "inf\n";
        return 2;
      }
      if (!oracle_out.empty()) write_text(oracle_out, path_to_json(Path{r.path, r.cost}) + "\n");
      std::cout << r.cost.value() << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
