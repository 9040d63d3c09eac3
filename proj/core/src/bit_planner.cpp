#include "octoplan/bit_planner.hpp"

namespace octoplan {

BitPlanner::BitPlanner(PlannerProblem problem, std::uint64_t seed, BitPlannerConfig cfg)
    : problem_((validate_problem(problem), std::move(problem))),
      cfg_(cfg),
      rng_(seed),
      checker_(problem_.world, problem_.shape, problem_.validity) {
  BitTreeConfig tc;
  tc.batch_size = cfg_.batch_size;
  tc.rgg_eta = cfg_.rgg_eta;
  tc.goal_tolerance = problem_.goal_tolerance;
  tree_ = std::make_unique<BitSearchTree>(problem_.x_start, problem_.x_goal, checker_, tc);
}

PlanResult BitPlanner::plan(const Termination& stop, const SolutionCallback& on_solution) {
  PlanResult result;
  Stopwatch clock;
  std::vector<int> protect;
  std::uint64_t iter = 0;
  auto done = [&] {
    if (iter >= stop.max_iterations) return true;
    if (clock.elapsed_ms() >= stop.time_budget_ms) return true;
    return stop.target_cost && c_best_.value() <= *stop.target_cost;
  };
  while (!done()) {
    tree_->step(c_best_, rng_, protect, &sampling_);
    ++iter;
    const auto goal = tree_->best_goal_vertex();
    if (!goal) continue;
    const Cost g = tree_->node(*goal).g;
    if (!(g < c_best_)) continue;
    c_best_ = g;
    protect = {*goal};
    SolutionEvent ev;
    ev.iteration = iter;
    ev.elapsed_ms = clock.elapsed_ms();
    ev.cost = g;
    ev.path = Path{tree_->path_to(*goal), g};
    if (on_solution) on_solution(ev);
    result.improvements.push_back(std::move(ev));
  }
  if (!result.improvements.empty()) result.path = result.improvements.back().path;
  result.stats.iterations = iter;
  result.stats.batches = tree_->batches();
  result.stats.state_checks = checker_.state_checks();
  result.stats.motion_checks = checker_.motion_checks();
  result.stats.vertices = tree_->vertices().size();
  result.stats.elapsed_ms = clock.elapsed_ms();
  return result;
}

}  // namespace octoplan
