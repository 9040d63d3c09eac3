#include <benchmark/benchmark.h>

#include <filesystem>
#include <map>
#include <memory>

#include "octoplan/bit_planner.hpp"
#include "octoplan/dual_bit_planner.hpp"
#include "octoplan/octree.hpp"
#include "octoplan/random.hpp"
#include "octoplan/sampling.hpp"
#include "octoplan/scenario.hpp"

using namespace octoplan;

namespace {

const Scenario& scenario(const char* name) {
  static std::map<std::string, Scenario> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    it = cache
             .emplace(name, load_scenario(std::filesystem::path(OCTOPLAN_SCENARIO_DIR) /
                                          (std::string(name) + ".json")))
             .first;
  }
  return it->second;
}

PosedScan random_scan(RandomSource& rng, std::size_t points) {
  PosedScan scan;
  scan.origin = State{0.05, 0.05, 0.05};
  scan.max_range = 5.0;
  for (std::size_t i = 0; i < points; ++i) {
    scan.points.push_back(State{rng.draw_uniform(-4, 4), rng.draw_uniform(-4, 4),
                                rng.draw_uniform(-1, 2)});
  }
  return scan;
}

}  // namespace

static void BM_OctreeInsertScan(benchmark::State& st) {
  RandomSource rng(1);
  const PosedScan scan = random_scan(rng, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) {
    OccupancyOctree map(0.05, 16);
    map.insert_scan(scan);
    benchmark::DoNotOptimize(map.node_count());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_OctreeInsertScan)->Arg(100)->Arg(1000);

static void BM_OctreeQuery(benchmark::State& st) {
  RandomSource rng(2);
  OccupancyOctree map(0.05, 16);
  for (int i = 0; i < 5; ++i) map.insert_scan(random_scan(rng, 2000));
  map.prune();
  for (auto _ : st) {
    const State p{rng.draw_uniform(-4, 4), rng.draw_uniform(-4, 4), rng.draw_uniform(-1, 2)};
    benchmark::DoNotOptimize(map.query(p));
  }
}
BENCHMARK(BM_OctreeQuery);

static void BM_StateValidity(benchmark::State& st, const char* name) {
  const Scenario& s = scenario(name);
  RandomSource rng(3);
  const RobotShape shape{s.robot_radius};
  for (auto _ : st) {
    benchmark::DoNotOptimize(is_state_valid(*s.world, shape, s.validity, sample_uniform(s.bounds, rng)));
  }
}
BENCHMARK_CAPTURE(BM_StateValidity, wall2d, "wall2d");
BENCHMARK_CAPTURE(BM_StateValidity, lab3d, "lab3d");

static void BM_MotionValidity(benchmark::State& st, const char* name) {
  const Scenario& s = scenario(name);
  RandomSource rng(4);
  const RobotShape shape{s.robot_radius};
  for (auto _ : st) {
    const State a = sample_uniform(s.bounds, rng);
    const State b = interpolate(a, sample_uniform(s.bounds, rng), 0.2);
    benchmark::DoNotOptimize(is_motion_valid(*s.world, shape, s.validity, a, b));
  }
}
BENCHMARK_CAPTURE(BM_MotionValidity, wall2d, "wall2d");
BENCHMARK_CAPTURE(BM_MotionValidity, lab3d, "lab3d");

static void BM_InformedSample(benchmark::State& st) {
  const InformedSet set(State{0, 0, 0}, State{2, 1, 0.5}, Cost(3.0));
  const Bounds b(State{-1, -1, -1}, State{3, 2, 2});
  RandomSource rng(5);
  for (auto _ : st) benchmark::DoNotOptimize(sample_informed(set, b, rng));
}
BENCHMARK(BM_InformedSample);

static void BM_BitIterations(benchmark::State& st) {
  const Scenario& s = scenario("wall2d");
  for (auto _ : st) {
    BitPlanner p(s.problem(), 7);
    Termination t;
    t.max_iterations = static_cast<std::uint64_t>(st.range(0));
    benchmark::DoNotOptimize(p.plan(t).stats.iterations);
  }
}
BENCHMARK(BM_BitIterations)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_DualBitIterations(benchmark::State& st) {
  const Scenario& s = scenario("wall2d");
  for (auto _ : st) {
    DualBitPlanner p(s.problem(), 7);
    Termination t;
    t.max_iterations = static_cast<std::uint64_t>(st.range(0));
    benchmark::DoNotOptimize(p.plan(t).stats.iterations);
  }
}
BENCHMARK(BM_DualBitIterations)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
